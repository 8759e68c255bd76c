//! Seeded random polynomial PDEs for property checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::seriesgen::PerturbedPde;
use crate::symcore::atom::{Atom, Deriv};
use crate::symcore::Expr;

/// `u, u_x, u_t, u_xx, u_xt, u_tt`.
fn slots() -> Vec<Expr> {
    [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
        .into_iter()
        .map(|(dx, dt)| Expr::atom(Atom::Dep(Deriv::new(dx, dt))))
        .collect()
}

/// Sum of 1 to 3 monomials of total degree 1 to 3 in the slots, with
/// nonzero integer coefficients in `[-3, 3]`.
fn random_poly(rng: &mut ChaCha8Rng, slots: &[Expr]) -> Expr {
    let terms = rng.gen_range(1..=3);
    Expr::add((0..terms).map(|_| {
        let mut c: i64 = rng.gen_range(1..=3);
        if rng.gen_bool(0.5) {
            c = -c;
        }
        let degree = rng.gen_range(1..=3);
        let factors = (0..degree).map(|_| slots[rng.gen_range(0..slots.len())].clone());
        Expr::int(c) * Expr::mul(factors)
    }))
}

/// `E0 = u_t + P(...)`, `E1 = Q(...)` with `P`, `Q` random polynomials in
/// `u` and its derivatives up to order 2.
pub fn random_pde(seed: u64) -> PerturbedPde {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = slots();
    let e0 = s[2].clone() + random_poly(&mut rng, &s);
    let mut e1 = random_poly(&mut rng, &s);
    if e1.atoms(true).is_empty() {
        e1 = s[3].clone();
    }
    let e0 = if e0.atoms(true).is_empty() { s[2].clone() } else { e0 };
    PerturbedPde::new(&format!("random-{seed}"), e0, e1).expect("sampled model is valid")
}

pub fn random_pdes(seed: u64, count: usize) -> Vec<PerturbedPde> {
    (0..count as u64).map(|k| random_pde(seed.wrapping_add(k))).collect()
}
