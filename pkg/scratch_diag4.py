"""Clean dispersion check: homogeneous bar, compression + bending modes,
patch vs full, plus eigenvalue real parts (self-adjointness indicator)."""
import numpy as np

from patchbeam import solvers as S
from scratch_check import make_model

kw = dict(L=0.105, W=0.015, T=0.009, ny=4, nz=4, tip_load_n=0.0, eta=0.0)

mf, _ = make_model(x_int=164, full=True, **kw)
Jf = S.model_jacobian(mf)
sf = S.classify_modes(S.eigenmodes(Jf, S.SolverSettings(), count=40), mf)

m9, _ = make_model(x_int=164, full=False, n_patches=9, nx=7, interp=4, **kw)
J9 = S.model_jacobian(m9)
s9 = S.classify_modes(S.eigenmodes(J9, S.SolverSettings(), count=40), m9)

for name, spec in [("full", sf), ("9p", s9)]:
    print(f"--- {name}")
    for i in range(min(16, len(spec.eigenvalues))):
        lam = spec.eigenvalues[i]
        print(f"  {lam.real:+.3e} {lam.imag:+.5f}i  {spec.mode_type[i]:12s}"
              f" n{spec.mode_number[i]}  part={np.round(spec.participation[i], 2)}")

print("compression 1 target pi/2 =", np.pi / 2)
print("full comp:", sf.frequencies("compression")[:2])
print("9p comp:", s9.frequencies("compression")[:2])
print("full z-bend:", sf.frequencies("z_bend")[:4])
print("9p z-bend:", s9.frequencies("z_bend")[:4])
print("max |Re| full:", np.abs(sf.eigenvalues.real).max(),
      " 9p:", np.abs(s9.eigenvalues.real).max())
