//! Shared test support: double-double arithmetic used as an independent
//! high-precision oracle, and the parameter families exercised across the
//! integration suites.

#![allow(dead_code)]

use qchain::ChainParams;

/// Double-double number: an unevaluated sum hi + lo with |lo| <= ulp(hi)/2,
/// giving roughly 32 significant decimal digits. Only the operations needed
/// by the oracles are implemented.
#[derive(Debug, Copy, Clone)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = a.mul_add(b, -p);
    (p, err)
}

impl Dd {
    pub fn from(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn value(self) -> f64 {
        self.hi + self.lo
    }

    pub fn add(self, other: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, other.hi);
        let e = e + self.lo + other.lo;
        let (hi, lo) = two_sum(s, e);
        Dd { hi, lo }
    }

    pub fn add_f(self, other: f64) -> Dd {
        self.add(Dd::from(other))
    }

    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    pub fn sub(self, other: Dd) -> Dd {
        self.add(other.neg())
    }

    pub fn mul(self, other: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, other.hi);
        let e = e + self.hi * other.lo + self.lo * other.hi;
        let (hi, lo) = two_sum(p, e);
        Dd { hi, lo }
    }

    pub fn mul_f(self, other: f64) -> Dd {
        self.mul(Dd::from(other))
    }

    pub fn div(self, other: Dd) -> Dd {
        let q1 = self.hi / other.hi;
        let r = self.sub(other.mul_f(q1));
        let q2 = r.hi / other.hi;
        let r2 = r.sub(other.mul_f(q2));
        let q3 = r2.hi / other.hi;
        Dd::from(q1).add_f(q2).add_f(q3)
    }

    pub fn powi(self, n: i32) -> Dd {
        if n < 0 {
            return Dd::from(1.0).div(self.powi(-n));
        }
        let mut out = Dd::from(1.0);
        let mut base = self;
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                out = out.mul(base);
            }
            base = base.mul(base);
            k >>= 1;
        }
        out
    }
}

/// Product of factors carried entirely in double-double precision.
pub fn dd_product(factors: impl IntoIterator<Item = Dd>) -> Dd {
    factors.into_iter().fold(Dd::from(1.0), |acc, f| acc.mul(f))
}

/// q-Pochhammer (a; q)_n in double-double precision.
pub fn dd_qpochhammer(a: Dd, q: Dd, n: usize) -> Dd {
    let mut out = Dd::from(1.0);
    let mut aq = a;
    for _ in 0..n {
        out = out.mul(Dd::from(1.0).sub(aq));
        aq = aq.mul(q);
    }
    out
}

/// Recurrence coefficient A_n in double-double precision, straight from the
/// defining rational expression.
pub fn dd_coeff_a(p: &ChainParams, n: i32) -> Dd {
    let q = Dd::from(p.q);
    let al = Dd::from(p.alpha);
    let be = Dd::from(p.beta);
    let ga = Dd::from(p.gamma);
    let de = Dd::from(p.delta);
    let qn1 = q.powi(n + 1);
    let num = dd_product([
        al.mul(qn1).add_f(-1.0),
        ga.mul(qn1).add_f(-1.0),
        al.mul(be).mul(qn1).add_f(-1.0),
        be.mul(de).mul(qn1).add_f(-1.0),
    ]);
    let den = Dd::from(1.0)
        .sub(al.mul(be).mul(q.powi(2 * n + 1)))
        .mul(Dd::from(1.0).sub(al.mul(be).mul(q.powi(2 * n + 2))));
    num.div(den)
}

/// Recurrence coefficient C_n in double-double precision.
pub fn dd_coeff_c(p: &ChainParams, n: i32) -> Dd {
    let q = Dd::from(p.q);
    let al = Dd::from(p.alpha);
    let be = Dd::from(p.beta);
    let ga = Dd::from(p.gamma);
    let de = Dd::from(p.delta);
    let qn = q.powi(n);
    let num = dd_product([
        be.mul(qn).add_f(-1.0),
        al.mul(qn).sub(de),
        al.mul(be).mul(qn).sub(ga),
        q.powi(n + 1).sub(q),
    ]);
    let den = Dd::from(1.0)
        .sub(al.mul(be).mul(q.powi(2 * n)))
        .mul(Dd::from(1.0).sub(al.mul(be).mul(q.powi(2 * n + 1))));
    num.div(den)
}

/// The four parameter regimes exercised by the weight and spectrum suites,
/// all valid for every chain length 2..=30.
pub fn regime_params(regime: &str, n: usize) -> ChainParams {
    let q: f64 = 0.7;
    let (beta, delta) = match regime {
        "generic" => (q.powi(2 * n as i32), 0.2),
        "beta0" => (0.0, 0.2),
        "delta0" => (q.powi(2 * n as i32), 0.0),
        "both0" => (0.0, 0.0),
        other => panic!("unknown regime {other}"),
    };
    ChainParams::truncated(q, beta, 0.5, delta, n, 1).unwrap()
}

pub fn generic_params(n: usize) -> ChainParams {
    regime_params("generic", n)
}

pub fn table1_params() -> ChainParams {
    ChainParams::truncated(0.8, 0.0, 0.5, 0.0, 49, 1).unwrap()
}

/// Draws a random valid parameter set from the seeded generator, resampling
/// until the chain validity conditions hold.
pub fn random_valid_params<R: rand::Rng>(rng: &mut R, n_max: usize) -> ChainParams {
    loop {
        let q: f64 = rng.gen_range(0.55..0.9);
        let gamma = rng.gen_range(0.2..0.7);
        let delta = rng.gen_range(0.0..0.4);
        let n = rng.gen_range(5..=n_max);
        let beta = if rng.gen_bool(0.5) { 0.0 } else { q.powi(2 * n as i32) };
        let Ok(p) = ChainParams::truncated(q, beta, gamma, delta, n, 1) else {
            continue;
        };
        if qchain::validate(&p).is_valid() {
            return p;
        }
    }
}
