//! Independent reference simulator built on creation-operator polynomials.
//!
//! A Fock term `|n_1 ... >` is stored as the monomial `Π (a†)^n / sqrt(n!)`.
//! Optical elements act by substituting creation operators, and detection is
//! read off after substituting the diagonal basis on detector modes. Nothing
//! here calls the library's elements or measurement code.

#![allow(dead_code)]

use std::collections::BTreeMap;

use photon_filter::{Amplitude, BasisConfiguration, Occupancy, PureState};
use rand::Rng;

/// Mode labels: 0 = H, 1 = V, 2 = +, 3 = -.
pub type Op = (usize, u8);
pub type Poly = BTreeMap<Vec<Op>, Amplitude>;

const H: u8 = 0;
const V: u8 = 1;
const PLUS: u8 = 2;
const MINUS: u8 = 3;

fn fact(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// `mode_map` relabels the state's modes inside the polynomial.
pub fn to_poly(s: &PureState, mode_map: impl Fn(usize) -> usize) -> Poly {
    let mut p = Poly::new();
    for (c, a) in s.terms() {
        let mut mono = Vec::new();
        let mut norm = 1.0;
        for (m, o) in c.occupancies().iter().enumerate() {
            mono.extend(std::iter::repeat_n((mode_map(m), H), o.h as usize));
            mono.extend(std::iter::repeat_n((mode_map(m), V), o.v as usize));
            norm *= fact(o.h) * fact(o.v);
        }
        mono.sort();
        *p.entry(mono).or_default() += a / norm.sqrt();
    }
    p
}

pub fn multiply(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            let mut m = ma.clone();
            m.extend_from_slice(mb);
            m.sort();
            *out.entry(m).or_default() += ca * cb;
        }
    }
    out
}

/// Replaces every operator by a linear combination of operators.
pub fn substitute(p: &Poly, f: impl Fn(Op) -> Vec<(Op, Amplitude)>) -> Poly {
    let mut out = Poly::new();
    for (mono, c) in p {
        let mut partial: Vec<(Vec<Op>, Amplitude)> = vec![(Vec::new(), *c)];
        for &op in mono {
            let images = f(op);
            partial = partial
                .into_iter()
                .flat_map(|(m, a)| {
                    images.iter().map(move |&(o, w)| {
                        let mut m = m.clone();
                        m.push(o);
                        (m, a * w)
                    })
                })
                .collect();
        }
        for (mut m, a) in partial {
            m.sort();
            *out.entry(m).or_default() += a;
        }
    }
    out
}

/// Polarizing beam splitter: H crosses between `a` and `b`, V stays.
pub fn pbs(p: &Poly, a: usize, b: usize) -> Poly {
    substitute(p, |(m, pol)| {
        let m = match (pol, m) {
            (H, x) if x == a => b,
            (H, x) if x == b => a,
            _ => m,
        };
        vec![((m, pol), Amplitude::new(1.0, 0.0))]
    })
}

fn to_diagonal(p: &Poly, detectors: &[usize]) -> Poly {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    substitute(p, |(m, pol)| {
        if !detectors.contains(&m) {
            return vec![((m, pol), Amplitude::new(1.0, 0.0))];
        }
        let sign = if pol == V { -r } else { r };
        vec![
            ((m, PLUS), Amplitude::new(r, 0.0)),
            ((m, MINUS), Amplitude::new(sign, 0.0)),
        ]
    })
}

/// Per detected pattern `[(plus, minus)]`: the unnormalized state left on
/// `n_modes` modes (detector modes emptied).
pub fn detect(
    p: &Poly,
    n_modes: usize,
    detectors: &[usize],
) -> BTreeMap<Vec<(u32, u32)>, PureState> {
    let diag = to_diagonal(p, detectors);
    type Grouped = BTreeMap<Vec<(u32, u32)>, Vec<(BasisConfiguration, Amplitude)>>;
    let mut out = Grouped::new();
    for (mono, c) in &diag {
        let mut occ = vec![(0u32, 0u32); n_modes];
        let mut pattern = vec![(0u32, 0u32); detectors.len()];
        for &(m, pol) in mono {
            match pol {
                H => occ[m].0 += 1,
                V => occ[m].1 += 1,
                PLUS | MINUS => {
                    let d = detectors.iter().position(|&x| x == m).unwrap();
                    if pol == PLUS {
                        pattern[d].0 += 1
                    } else {
                        pattern[d].1 += 1
                    }
                }
                _ => unreachable!(),
            }
        }
        let weight: f64 = occ.iter().map(|&(h, v)| fact(h) * fact(v)).product::<f64>()
            * pattern
                .iter()
                .map(|&(a, b)| fact(a) * fact(b))
                .product::<f64>();
        let cfg = BasisConfiguration::from_occupancies(
            occ.iter().map(|&(h, v)| Occupancy::new(h, v)).collect(),
        );
        out.entry(pattern)
            .or_default()
            .push((cfg, c * weight.sqrt()));
    }
    out.into_iter()
        .map(|(k, terms)| {
            let mut merged: BTreeMap<BasisConfiguration, Amplitude> = BTreeMap::new();
            for (c, a) in terms {
                *merged.entry(c).or_default() += a;
            }
            (k, PureState::from_terms(n_modes, merged).unwrap())
        })
        .filter(|(_, s)| s.norm_sqr() > 1e-15)
        .collect()
}

pub struct OracleBranch {
    pub pattern: Vec<(u32, u32)>,
    pub probability: f64,
    pub j: u32,
    /// Normalized, sign corrected when requested.
    pub output: PureState,
}

/// The parity filter with target photon `k` on mode `k` and ancilla photon
/// `k` on mode `n + k`. Returns the single-click branches.
pub fn oracle_filter(input: &PureState, ancilla: &PureState, sign_fix: bool) -> Vec<OracleBranch> {
    let n = input.mode_count();
    let mut p = multiply(&to_poly(input, |m| m), &to_poly(ancilla, |m| n + m));
    for k in 0..n {
        p = pbs(&p, k, n + k);
    }
    let detectors: Vec<usize> = (n..2 * n).collect();
    let keep: Vec<usize> = (0..n).collect();
    detect(&p, 2 * n, &detectors)
        .into_iter()
        .filter(|(pat, _)| pat.iter().all(|&(a, b)| a + b == 1))
        .map(|(pattern, s)| {
            let j: u32 = pattern.iter().map(|&(_, m)| m).sum();
            let probability = s.norm_sqr();
            let s = s.select_modes(&keep).unwrap().normalized().unwrap();
            let output = if sign_fix && j % 2 == 1 {
                let terms: Vec<_> = s
                    .terms()
                    .map(|(c, a)| {
                        (
                            c.clone(),
                            if c.occupancies()[0].v % 2 == 1 {
                                -a
                            } else {
                                *a
                            },
                        )
                    })
                    .collect();
                PureState::from_terms(n, terms).unwrap()
            } else {
                s
            };
            OracleBranch {
                pattern,
                probability,
                j,
                output,
            }
        })
        .collect()
}

/// Heralded probability under independent per-photon registration: exactly
/// one of the photons reaching each detector registers.
pub fn oracle_heralded(input: &PureState, ancilla: &PureState, eta: f64) -> f64 {
    let n = input.mode_count();
    let mut p = multiply(&to_poly(input, |m| m), &to_poly(ancilla, |m| n + m));
    for k in 0..n {
        p = pbs(&p, k, n + k);
    }
    let detectors: Vec<usize> = (n..2 * n).collect();
    detect(&p, 2 * n, &detectors)
        .iter()
        .map(|(pat, s)| {
            let herald: f64 = pat
                .iter()
                .map(|&(a, b)| {
                    let k = a + b;
                    if k == 0 {
                        0.0
                    } else {
                        k as f64 * eta * (1.0 - eta).powi(k as i32 - 1)
                    }
                })
                .product();
            herald * s.norm_sqr()
        })
        .sum()
}

pub fn random_amp(rng: &mut impl Rng) -> Amplitude {
    Amplitude::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Random normalized state with one photon per mode and every polarization
/// pattern populated.
pub fn random_polarization_state(n: usize, rng: &mut impl Rng) -> PureState {
    let terms: Vec<_> = (0..1u32 << n)
        .map(|bits| {
            let pols = (0..n)
                .map(|k| {
                    if bits >> k & 1 == 1 {
                        photon_filter::Polarization::V
                    } else {
                        photon_filter::Polarization::H
                    }
                })
                .collect::<Vec<_>>();
            (pols, random_amp(rng))
        })
        .collect();
    PureState::from_polarization_terms(n, terms)
        .unwrap()
        .normalized()
        .unwrap()
}

/// `α|H..H> + β|V..V>` with random complex amplitudes.
pub fn random_parity_state(n: usize, rng: &mut impl Rng) -> PureState {
    use photon_filter::Polarization::{H as PH, V as PV};
    PureState::from_polarization_terms(
        n,
        [
            (vec![PH; n], random_amp(rng)),
            (vec![PV; n], random_amp(rng)),
        ],
    )
    .unwrap()
    .normalized()
    .unwrap()
}

use photon_filter::experiment::{AncillaSpec, ExperimentSpec, InputComponent, Term};

fn random_pattern(n: usize, rng: &mut impl Rng) -> Vec<photon_filter::Polarization> {
    (0..n)
        .map(|_| {
            if rng.gen_bool(0.5) {
                photon_filter::Polarization::H
            } else {
                photon_filter::Polarization::V
            }
        })
        .collect()
}

fn random_terms(n: usize, rng: &mut impl Rng) -> Vec<Term> {
    let want = rng.gen_range(1..=(1usize << n).min(4));
    let mut terms: Vec<Term> = Vec::new();
    while terms.len() < want {
        let p = random_pattern(n, rng);
        if terms.iter().all(|(q, _)| *q != p) {
            let mut a = random_amp(rng);
            if a.norm() < 1e-3 {
                a = Amplitude::new(1.0, 0.0);
            }
            terms.push((p, a));
        }
    }
    terms
}

/// An arbitrary, not necessarily normalized, experiment description.
pub fn random_spec(rng: &mut impl Rng) -> ExperimentSpec {
    let n = rng.gen_range(1..=4);
    let comps = rng.gen_range(1..=3);
    let input = (0..comps)
        .map(|_| InputComponent {
            weight: if comps == 1 {
                1.0
            } else {
                rng.gen_range(0.05..1.0)
            },
            terms: random_terms(n, rng),
        })
        .collect();
    let ancilla = match rng.gen_range(0..3) {
        1 if n > 1 => {
            let mut pattern = random_pattern(n, rng);
            if pattern.windows(2).all(|w| w[0] == w[1]) {
                pattern[0] = pattern[0].flipped();
            }
            AncillaSpec::Contaminated {
                epsilon: random_amp(rng) * 0.5,
                pattern,
            }
        }
        2 => AncillaSpec::Explicit(random_terms(n, rng)),
        _ => AncillaSpec::Ghz,
    };
    ExperimentSpec {
        n,
        input,
        ancilla,
        eta: rng.gen_range(0.0..=1.0),
        sign_correct: rng.gen_bool(0.5),
        convention: photon_filter::FidelityConvention::Amplitude,
    }
}

fn terms_close(a: &[Term], b: &[Term], tol: f64) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b)
            .all(|((pa, x), (pb, y))| pa == pb && (x - y).norm() <= tol)
}

/// Field-by-field equality with amplitudes and weights compared to `tol`.
pub fn specs_close(a: &ExperimentSpec, b: &ExperimentSpec, tol: f64) -> bool {
    let ancilla = match (&a.ancilla, &b.ancilla) {
        (AncillaSpec::Ghz, AncillaSpec::Ghz) => true,
        (
            AncillaSpec::Contaminated {
                epsilon: e1,
                pattern: p1,
            },
            AncillaSpec::Contaminated {
                epsilon: e2,
                pattern: p2,
            },
        ) => p1 == p2 && (e1 - e2).norm() <= tol,
        (AncillaSpec::Explicit(x), AncillaSpec::Explicit(y)) => terms_close(x, y, tol),
        _ => false,
    };
    ancilla
        && a.n == b.n
        && a.eta == b.eta
        && a.sign_correct == b.sign_correct
        && a.input.len() == b.input.len()
        && a.input.iter().zip(&b.input).all(|(x, y)| {
            (x.weight - y.weight).abs() <= tol && terms_close(&x.terms, &y.terms, tol)
        })
}
