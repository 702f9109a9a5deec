"""
Power weights and the A_p ceiling
=================================

Scan S_lambda on L^p(x^alpha) for p = 5/2 and compare the worst norm ratio
over a fixed test family with C [w]_{A_p}^{3/2}.
"""

from walshlab.calibration import load_calibration
from walshlab.experiments import weighted_trials

C = load_calibration()["weights"]["s_lambda_ceiling"]
for name, scan in weighted_trials(N=10, p=2.5, constant=C).items():
    print(f"{name}: fitted exponent {scan.fitted_exponent:.3f} (ceiling exponent {scan.exponent})")
    for row in scan.rows[::3]:
        print(f"  alpha {row['alpha']:+.3f}  [w] {row['characteristic']:8.3f}  "
              f"ratio {row['ratio']:.3f}  ceiling {row['ceiling']:8.3f}")
