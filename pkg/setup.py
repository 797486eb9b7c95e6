"""Optional compiled kernel; the package falls back to numpy when the build is unavailable."""
from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    ext_modules = cythonize(["src/gpdext/_snf.pyx"], language_level=3, quiet=True)
except Exception:  # Cython missing: pure fallback only
    ext_modules = []

setup(ext_modules=ext_modules)
