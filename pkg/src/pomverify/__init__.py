"""Verification toolkit for Pomerance's conjecture on P-integers.

A positive integer ``k`` is a P-integer when the first ``phi(k)`` primes
coprime to ``k`` form a reduced residue system modulo ``k``.  The package
bundles an exact prime engine, rigorous interval evaluation of explicit
prime-counting bounds, the residue-counting criterion, a fast witness scan
and certificates for the analytic inequalities bounding P-integers.
"""

__version__ = "0.1.0"

KNOWN_P_INTEGERS = (2, 4, 6, 12, 18, 30)
