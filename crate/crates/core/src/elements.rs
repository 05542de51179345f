//! Linear-optical elements acting on [`PureState`]s.

use crate::error::{Error, Result};
use crate::fock::{Amplitude, BasisConfiguration, Occupancy, PureState};

/// The two ports of a polarizing beam splitter.
///
/// Output ports reuse the input labels: after the element, mode `in_a`
/// holds the V photon that entered at `in_a` together with the H photon that
/// entered at `in_b`, and vice versa.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModePair {
    pub in_a: usize,
    pub in_b: usize,
}

impl ModePair {
    pub fn new(in_a: usize, in_b: usize) -> Result<Self> {
        if in_a == in_b {
            return Err(Error::DegenerateModePair(in_a));
        }
        Ok(ModePair { in_a, in_b })
    }
}

/// Polarizing beam splitter: H photons cross between the two modes, V
/// photons are transmitted.
///
/// The map permutes `(mode, polarization)` slots, so each basis configuration
/// goes to exactly one configuration with unit coefficient, whatever the
/// occupancy.
pub fn apply_pbs(s: &PureState, p: ModePair) -> Result<PureState> {
    if p.in_a == p.in_b {
        return Err(Error::DegenerateModePair(p.in_a));
    }
    s.check_mode(p.in_a)?;
    s.check_mode(p.in_b)?;
    Ok(s.map_terms(|c| {
        let a = c.get(p.in_a);
        let b = c.get(p.in_b);
        let mut out = c.clone();
        out.set(p.in_a, Occupancy::new(b.h, a.v));
        out.set(p.in_b, Occupancy::new(a.h, b.v));
        (out, Amplitude::new(1.0, 0.0))
    }))
}

/// Pauli Z on one mode: each V photon there contributes a factor of -1.
pub fn apply_sigma_z(s: &PureState, mode: usize) -> Result<PureState> {
    s.check_mode(mode)?;
    Ok(s.map_terms(|c| {
        let sign = if c.get(mode).v % 2 == 1 { -1.0 } else { 1.0 };
        (c.clone(), Amplitude::new(sign, 0.0))
    }))
}

/// Rewrites the mode in the `|±> = (|H> ± |V>)/√2` basis, storing `+` as H
/// and `-` as V. Self-inverse. Terms with two or more photons in the mode
/// are rejected; see [`expand_in_diagonal_basis`] for the general case.
pub fn rotate_to_diagonal(s: &PureState, mode: usize) -> Result<PureState> {
    s.check_mode(mode)?;
    if let Some((c, _)) = s.terms().find(|(c, _)| c.get(mode).total() >= 2) {
        return Err(Error::RotationOccupancy {
            mode,
            photons: c.get(mode).total(),
        });
    }
    Ok(expand_unchecked(s, mode))
}

/// Same basis change as [`rotate_to_diagonal`] for arbitrary occupancy.
///
/// A mode holding `nh` H and `nv` V photons is
/// `(a_H†)^nh (a_V†)^nv / sqrt(nh! nv!) |0>`; substituting
/// `a_H† = (a_+† + a_-†)/√2`, `a_V† = (a_+† - a_-†)/√2` and collecting powers
/// gives the `(n_plus, n_minus)` amplitudes, including the bosonic
/// `sqrt(n_plus! n_minus!)` factors. For example `|HV>` becomes
/// `(|2+> - |2->)/√2`.
pub fn expand_in_diagonal_basis(s: &PureState, mode: usize) -> Result<PureState> {
    s.check_mode(mode)?;
    Ok(expand_unchecked(s, mode))
}

fn expand_unchecked(s: &PureState, mode: usize) -> PureState {
    let mut out = PureState::zero(s.mode_count());
    for (c, a) in s.terms() {
        let occ = c.get(mode);
        for (plus, coeff) in diagonal_coefficients(occ.h, occ.v) {
            let mut nc: BasisConfiguration = c.clone();
            nc.set(mode, Occupancy::new(plus, occ.total() - plus));
            out.accumulate(nc, a * coeff);
        }
    }
    out
}

/// Non-zero `(n_plus, coefficient)` pairs for `|nh H, nv V>`.
fn diagonal_coefficients(nh: u32, nv: u32) -> Vec<(u32, f64)> {
    let n = nh + nv;
    let prefactor = 2f64.powf(-(n as f64) / 2.0) / (factorial(nh) * factorial(nv)).sqrt();
    (0..=n)
        .filter_map(|plus| {
            let mut sum = 0i64;
            for k in 0..=nh.min(plus) {
                let l = plus - k;
                if l > nv {
                    continue;
                }
                let term = (binomial(nh, k) * binomial(nv, l)) as i64;
                sum += if (nv - l) % 2 == 1 { -term } else { term };
            }
            if sum == 0 {
                return None;
            }
            let bosonic = (factorial(plus) * factorial(n - plus)).sqrt();
            Some((plus, prefactor * bosonic * sum as f64))
        })
        .collect()
}

pub(crate) fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

pub(crate) fn binomial(n: u32, k: u32) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * u64::from(n - i) / u64::from(i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::Polarization::{H, V};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn occ(pairs: &[(u32, u32)]) -> PureState {
        PureState::basis(BasisConfiguration::from_occupancies(
            pairs.iter().map(|&(h, v)| Occupancy::new(h, v)).collect(),
        ))
    }

    fn pbs01(s: &PureState) -> PureState {
        apply_pbs(s, ModePair::new(0, 1).unwrap()).unwrap()
    }

    #[test]
    fn pbs_four_single_photon_cases() {
        assert_eq!(
            pbs01(&PureState::product(&[H, H])),
            PureState::product(&[H, H])
        );
        assert_eq!(
            pbs01(&PureState::product(&[V, V])),
            PureState::product(&[V, V])
        );
        assert_eq!(pbs01(&PureState::product(&[V, H])), occ(&[(1, 1), (0, 0)]));
        assert_eq!(pbs01(&PureState::product(&[H, V])), occ(&[(0, 0), (1, 1)]));
    }

    #[test]
    fn pbs_double_occupancy_and_vacuum() {
        assert_eq!(pbs01(&occ(&[(1, 1), (0, 0)])), PureState::product(&[V, H]));
        assert_eq!(pbs01(&PureState::vacuum(2)), PureState::vacuum(2));
        assert_eq!(pbs01(&occ(&[(2, 1), (0, 3)])), occ(&[(0, 1), (2, 3)]));
    }

    #[test]
    fn pbs_errors() {
        let s = PureState::product(&[H, H]);
        assert!(matches!(
            apply_pbs(&s, ModePair { in_a: 0, in_b: 2 }),
            Err(Error::InvalidMode { mode: 2, modes: 2 })
        ));
        assert_eq!(ModePair::new(1, 1), Err(Error::DegenerateModePair(1)));
    }

    #[test]
    fn sigma_z_examples() {
        let h = PureState::product(&[H]);
        let v = PureState::product(&[V]);
        assert_eq!(apply_sigma_z(&h, 0).unwrap(), h);
        assert_eq!(
            apply_sigma_z(&v, 0).unwrap(),
            v.scaled(Amplitude::new(-1.0, 0.0))
        );

        let (alpha, beta) = (Amplitude::new(0.6, 0.0), Amplitude::new(0.0, 0.8));
        let minus =
            PureState::from_polarization_terms(2, [(vec![H, H], alpha), (vec![V, V], -beta)])
                .unwrap();
        let plus = PureState::from_polarization_terms(2, [(vec![H, H], alpha), (vec![V, V], beta)])
            .unwrap();
        assert_eq!(apply_sigma_z(&minus, 0).unwrap(), plus);
        assert!(apply_sigma_z(&h, 1).is_err());
    }

    #[test]
    fn rotation_examples() {
        let h = PureState::product(&[H]);
        let r = rotate_to_diagonal(&h, 0).unwrap();
        for (_, a) in r.terms() {
            assert!((a.re - FRAC_1_SQRT_2).abs() < 1e-15);
        }
        assert_eq!(r.len(), 2);
        let back = rotate_to_diagonal(&r, 0).unwrap();
        assert!(
            (back
                .amplitude(&BasisConfiguration::from_polarizations(&[H]))
                .re
                - 1.0)
                .abs()
                < 1e-12
        );
        assert!(
            back.amplitude(&BasisConfiguration::from_polarizations(&[V]))
                .norm()
                < 1e-12
        );
        assert_eq!(
            rotate_to_diagonal(&occ(&[(1, 1)]), 0),
            Err(Error::RotationOccupancy {
                mode: 0,
                photons: 2
            })
        );
        assert!(Error::RotationOccupancy {
            mode: 0,
            photons: 2
        }
        .to_string()
        .starts_with("rotation beyond single occupancy unsupported"));
    }

    #[test]
    fn diagonal_expansion_of_hv_pair() {
        let e = expand_in_diagonal_basis(&occ(&[(1, 1)]), 0).unwrap();
        assert_eq!(e.len(), 2);
        assert!(
            (e.amplitude(&BasisConfiguration::from_occupancies(vec![Occupancy::new(
                2, 0
            )]))
            .re - FRAC_1_SQRT_2)
                .abs()
                < 1e-15
        );
        assert!(
            (e.amplitude(&BasisConfiguration::from_occupancies(vec![Occupancy::new(
                0, 2
            )]))
            .re + FRAC_1_SQRT_2)
                .abs()
                < 1e-15
        );
    }

    #[test]
    fn diagonal_expansion_is_unitary_and_self_inverse() {
        for nh in 0..4 {
            for nv in 0..4 {
                let s = occ(&[(nh, nv)]);
                let e = expand_in_diagonal_basis(&s, 0).unwrap();
                assert!((e.norm_sqr() - 1.0).abs() < 1e-12, "({nh},{nv})");
                let back = expand_in_diagonal_basis(&e, 0).unwrap().pruned(1e-24);
                assert!((back.overlap(&s).unwrap().re - 1.0).abs() < 1e-12);
                assert_eq!(back.len(), 1, "({nh},{nv})");
            }
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(2, 3), 0);
        assert_eq!(factorial(4), 24.0);
    }
}
