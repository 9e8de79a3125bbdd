"""Certified primes by recursion, and primes with a prescribed p-1 divisor."""
import random

from hmshare.primegen import maurer_prime, prime_with_prescribed_divisor, verify_certificate

rng = random.Random(7)
p, cert = maurer_prime(96, rng)
print(f"{p} ({p.bit_length()} bits)")
for w in cert.links:
    print(f"  n = {w.n} = {w.q} * {w.r} + 1, base {w.a} [{w.regime}]")
print("certificate verifies:", verify_certificate(cert))

D = 3 * 5 * 7 * 11 * 65537
p, r = prime_with_prescribed_divisor(D, 20, rng)
print(f"p = 1 + {D} * {r} = {p}")
