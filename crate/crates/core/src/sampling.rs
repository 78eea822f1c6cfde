//! Seeded random jets, polynomials and Wick elements for the invariant suites.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::CheckResult;
use crate::jets::scalar::{gi, gq};
use crate::jets::{GaussianRational, Jet, MultiIndex};
use crate::wick::{Key, WickElement};

/// Shape of a random Wick element.
#[derive(Clone, Copy, Debug)]
pub struct ElementShape {
    pub max_nu: u32,
    pub max_sym: u32,
    pub form_degree: u32,
    /// Highest monomial degree in the jet coefficients.
    pub coeff_degree: u32,
    pub terms: usize,
}

impl ElementShape {
    /// `terms` monomials of a fixed form degree, with `y`-degree at most
    /// `max_sym` and no `ν`.
    pub fn fibre(max_sym: u32, form_degree: u32, terms: usize) -> Self {
        ElementShape {
            max_nu: 0,
            max_sym,
            form_degree,
            coeff_degree: 1,
            terms,
        }
    }
}

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    /// Small nonzero Gaussian rational; real most of the time.
    pub fn scalar(&mut self) -> GaussianRational {
        let pick = |rng: &mut ChaCha8Rng| {
            let mut n = rng.gen_range(-3i64..=3);
            if n == 0 {
                n = 1;
            }
            (n, rng.gen_range(1i64..=3))
        };
        let (n, d) = pick(&mut self.rng);
        let mut c = gq(n, d);
        if self.rng.gen_bool(0.3) {
            let (n, d) = pick(&mut self.rng);
            c += gi(n, d);
        }
        c
    }

    pub fn multi_index(&mut self, dim: usize, degree: u32) -> MultiIndex {
        let mut idx = MultiIndex::ZERO;
        for _ in 0..degree {
            idx = idx.increment(self.below(dim));
        }
        idx
    }

    /// Polynomial with `terms` random monomials of degree at most `max_degree`.
    pub fn polynomial(&mut self, dim: usize, order: u32, max_degree: u32, terms: usize) -> Jet {
        let mut coeffs = Vec::with_capacity(terms);
        for _ in 0..terms {
            let deg = self.rng.gen_range(0..=max_degree.min(order));
            let idx = self.multi_index(dim, deg);
            coeffs.push((idx.exponents(dim), self.scalar()));
        }
        sum_terms(dim, order, coeffs)
    }

    /// Jet with every coefficient up to `order` filled in at random.
    pub fn dense_jet(&mut self, dim: usize, order: u32) -> Jet {
        let coeffs: Vec<_> = MultiIndex::up_to_degree(dim, order)
            .into_iter()
            .map(|idx| (idx.exponents(dim), self.scalar()))
            .collect();
        sum_terms(dim, order, coeffs)
    }

    pub fn form_mask(&mut self, dim: usize, degree: u32) -> u8 {
        let mut slots: Vec<usize> = (0..dim).collect();
        slots.shuffle(&mut self.rng);
        slots[..degree as usize].iter().fold(0u8, |m, &j| m | (1 << j))
    }

    pub fn element(&mut self, dim: usize, order: u32, shape: ElementShape) -> WickElement {
        let mut out = WickElement::zero(dim, order);
        for _ in 0..shape.terms {
            let nu = self.rng.gen_range(0..=shape.max_nu);
            let sym = self.rng.gen_range(0..=shape.max_sym);
            let key = Key::new(nu, self.multi_index(dim, sym), self.form_mask(dim, shape.form_degree));
            let coeff = self.polynomial(dim, order, shape.coeff_degree, 2);
            out.add_term(key, &coeff);
        }
        out
    }

    /// Element homogeneous in `Deg`, symmetric degree and form degree.
    pub fn homogeneous(
        &mut self,
        dim: usize,
        order: u32,
        nu: u32,
        sym: u32,
        form_degree: u32,
        terms: usize,
    ) -> WickElement {
        let mut out = WickElement::zero(dim, order);
        for _ in 0..terms {
            let key = Key::new(nu, self.multi_index(dim, sym), self.form_mask(dim, form_degree));
            let coeff = self.polynomial(dim, order, 1, 2);
            out.add_term(key, &coeff);
        }
        out
    }
}

/// Per-sample witnesses of one identity folded into a single check.
pub struct Tally {
    identity: String,
    samples: usize,
    witness: Option<String>,
}

impl Tally {
    pub fn new(identity: impl Into<String>) -> Self {
        Tally {
            identity: identity.into(),
            samples: 0,
            witness: None,
        }
    }

    pub fn record(&mut self, witness: Option<String>) {
        if self.witness.is_none() {
            self.witness = witness.map(|w| format!("sample {}: {w}", self.samples));
        }
        self.samples += 1;
    }

    pub fn finish(self) -> CheckResult {
        let identity = format!("{} [{} samples]", self.identity, self.samples);
        CheckResult::from_witness(identity, self.witness)
    }
}

fn sum_terms(dim: usize, order: u32, coeffs: Vec<(Vec<u32>, GaussianRational)>) -> Jet {
    let mut acc = Jet::zero(dim, order);
    for (exps, c) in coeffs {
        let term = Jet::from_coeffs(dim, order, [(exps, c)]).expect("degree within order");
        acc.add_assign_jet(&term);
    }
    acc
}
