//! Closed-form dimension and counting formulas: section counts of canonical
//! powers, Hitchin base and moduli dimensions per structure group, spectral
//! and quotient-curve genera, parabolic moduli dimensions, and torsion point
//! counts. Everything here is exact integer arithmetic.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Structure group tag for the dimension formulas. `So` and `Sp` carry the
/// matrix size (so `Sp { m: 4 }` is the rank-2 symplectic group).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum Group {
    #[serde(rename = "GL")]
    Gl { n: u64 },
    #[serde(rename = "SL")]
    Sl { n: u64 },
    #[serde(rename = "SO")]
    So { m: u64 },
    #[serde(rename = "Sp")]
    Sp { m: u64 },
}

impl Group {
    fn validate(&self) -> Result<()> {
        match *self {
            Group::Gl { n } if n >= 1 => Ok(()),
            Group::Gl { n } => Err(Error::domain(format!("GL({n}) needs n >= 1"))),
            Group::Sl { n } if n >= 2 => Ok(()),
            Group::Sl { n } => Err(Error::domain(format!("SL({n}) needs n >= 2"))),
            Group::So { m } if m >= 3 => Ok(()),
            Group::So { m } => Err(Error::domain(format!(
                "SO({m}) needs m >= 3 (smaller cases are not semisimple)"
            ))),
            Group::Sp { m } if m >= 2 && m % 2 == 0 => Ok(()),
            Group::Sp { m } => Err(Error::domain(format!("Sp({m}) needs even m >= 2"))),
        }
    }

    /// Degrees of a generating set of invariant polynomials.
    pub fn invariant_degrees(&self) -> Result<Vec<u64>> {
        self.validate()?;
        Ok(match *self {
            Group::Gl { n } => (1..=n).collect(),
            Group::Sl { n } => (2..=n).collect(),
            Group::So { m } if m % 2 == 1 => {
                let l = m / 2;
                (1..=l).map(|i| 2 * i).collect()
            }
            Group::So { m } => {
                // Even case: 2, 4, ..., m-2 plus the Pfaffian degree m/2.
                let l = m / 2;
                let mut d: Vec<u64> = (1..l).map(|i| 2 * i).collect();
                d.push(l);
                d.sort_unstable();
                d
            }
            Group::Sp { m } => {
                let l = m / 2;
                (1..=l).map(|i| 2 * i).collect()
            }
        })
    }

    /// Complex dimension of the group.
    pub fn dim(&self) -> Result<u64> {
        self.validate()?;
        Ok(match *self {
            Group::Gl { n } => n * n,
            Group::Sl { n } => n * n - 1,
            Group::So { m } => m * (m - 1) / 2,
            Group::Sp { m } => m / 2 * (m + 1),
        })
    }
}

fn check_genus(g: u64) -> Result<()> {
    if g < 2 {
        return Err(Error::domain(format!(
            "genus {g} rejected: these formulas assume genus >= 2"
        )));
    }
    Ok(())
}

/// Number of independent holomorphic sections of the i-th power of the
/// canonical bundle on a genus-g curve: 1 for i = 0, g for i = 1, and
/// (2i - 1)(g - 1) for i >= 2.
pub fn h0_canonical_power(g: u64, i: u64) -> Result<u64> {
    check_genus(g)?;
    Ok(match i {
        0 => 1,
        1 => g,
        _ => (2 * i - 1) * (g - 1),
    })
}

/// Dimension of the Hitchin base: the sum of section counts over the
/// invariant degrees of the group.
pub fn hitchin_base_dim(group: Group, g: u64) -> Result<u64> {
    check_genus(g)?;
    let mut total = 0;
    for d in group.invariant_degrees()? {
        total += h0_canonical_power(g, d)?;
    }
    Ok(total)
}

/// Complex dimension of the Higgs bundle moduli space. For GL(n) this is
/// 2n^2(g-1) + 2; the semisimple groups give twice the group dimension
/// times (g-1).
pub fn moduli_dim(group: Group, g: u64) -> Result<u64> {
    check_genus(g)?;
    group.validate()?;
    Ok(match group {
        Group::Gl { n } => 2 * n * n * (g - 1) + 2,
        other => 2 * other.dim()? * (g - 1),
    })
}

/// Genus of the n-sheeted spectral curve over a genus-g base:
/// 1 + n^2 (g - 1).
pub fn spectral_genus(n: u64, g: u64) -> Result<u64> {
    check_genus(g)?;
    if n < 1 {
        return Err(Error::domain("spectral genus needs n >= 1"));
    }
    Ok(1 + n * n * (g - 1))
}

/// Genera of the rank-2p spectral curve and its quotient under the sheet
/// involution, as used for U(p,p) pairs: (4p^2(g-1) + 1, (2p^2 - p)(g-1) + 1).
pub fn upp_genera(p: u64, g: u64) -> Result<(u64, u64)> {
    check_genus(g)?;
    if p < 1 {
        return Err(Error::domain("quotient genera need p >= 1"));
    }
    let top = 4 * p * p * (g - 1) + 1;
    let quotient = (2 * p * p - p) * (g - 1) + 1;
    Ok((top, quotient))
}

/// Dimension of the moduli of stable parabolic Higgs bundles of rank r on a
/// genus-g curve with n marked points: (2g - 2) r^2 + 2 + n r (r - 1).
/// Genus 0 is allowed here.
pub fn parabolic_moduli_dim(g: u64, r: u64, n: u64) -> Result<i64> {
    if r < 1 {
        return Err(Error::domain("parabolic moduli dimension needs rank >= 1"));
    }
    let g = g as i64;
    let r = r as i64;
    let n = n as i64;
    Ok((2 * g - 2) * r * r + 2 + n * r * (r - 1))
}

/// Number of order-two points in an abelian variety of the given dimension:
/// 2^(2 dim). Used to count the split-form locus inside a regular fibre.
pub fn torsion_two_count(prym_dim: u64) -> Result<u128> {
    if 2 * prym_dim >= 128 {
        return Err(Error::domain(format!(
            "torsion count overflows 128 bits for dimension {prym_dim}"
        )));
    }
    Ok(1u128 << (2 * prym_dim))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Riemann-Roch oracle: for i >= 2 the bundle has degree
    /// i(2g-2) > 2g-2, so h0 = deg - g + 1.
    fn h0_oracle(g: u64, i: u64) -> u64 {
        match i {
            0 => 1,
            1 => g,
            _ => i * (2 * g - 2) - g + 1,
        }
    }

    #[test]
    fn h0_values_and_oracle() {
        assert_eq!(h0_canonical_power(2, 0).unwrap(), 1);
        assert_eq!(h0_canonical_power(2, 1).unwrap(), 2);
        assert_eq!(h0_canonical_power(2, 2).unwrap(), 3);
        assert_eq!(h0_canonical_power(3, 2).unwrap(), 6);
        for g in 2..=10 {
            for i in 0..=8 {
                assert_eq!(h0_canonical_power(g, i).unwrap(), h0_oracle(g, i));
            }
        }
        assert!(h0_canonical_power(1, 2).is_err());
        assert!(h0_canonical_power(0, 0).is_err());
    }

    #[test]
    fn base_and_moduli_examples() {
        assert_eq!(moduli_dim(Group::Gl { n: 2 }, 2).unwrap(), 10);
        assert_eq!(hitchin_base_dim(Group::Gl { n: 2 }, 2).unwrap(), 5);
        assert_eq!(hitchin_base_dim(Group::Sl { n: 2 }, 2).unwrap(), 3);
        assert_eq!(moduli_dim(Group::Sl { n: 2 }, 2).unwrap(), 6);
        assert_eq!(hitchin_base_dim(Group::Sl { n: 3 }, 2).unwrap(), 8);
        assert_eq!(moduli_dim(Group::Sl { n: 3 }, 2).unwrap(), 16);
    }

    #[test]
    fn base_is_half_of_moduli_for_all_families() {
        let groups = [
            Group::Gl { n: 1 },
            Group::Gl { n: 4 },
            Group::Sl { n: 2 },
            Group::Sl { n: 5 },
            Group::So { m: 3 },
            Group::So { m: 4 },
            Group::So { m: 7 },
            Group::So { m: 8 },
            Group::Sp { m: 2 },
            Group::Sp { m: 6 },
        ];
        for group in groups {
            for g in 2..=6 {
                assert_eq!(
                    2 * hitchin_base_dim(group, g).unwrap(),
                    moduli_dim(group, g).unwrap(),
                    "group {group:?} genus {g}"
                );
            }
        }
    }

    #[test]
    fn group_validation() {
        assert!(Group::Gl { n: 0 }.invariant_degrees().is_err());
        assert!(Group::Sl { n: 1 }.invariant_degrees().is_err());
        assert!(Group::So { m: 2 }.invariant_degrees().is_err());
        assert!(Group::Sp { m: 3 }.invariant_degrees().is_err());
        assert_eq!(Group::So { m: 8 }.invariant_degrees().unwrap(), vec![2, 4, 4, 6]);
        assert_eq!(Group::So { m: 7 }.invariant_degrees().unwrap(), vec![2, 4, 6]);
    }

    #[test]
    fn spectral_genus_against_riemann_hurwitz() {
        // Oracle: 2 g_S - 2 = n (2g - 2) + n(n-1)(2g - 2).
        for n in 1..=6 {
            for g in 2..=10 {
                let gs = spectral_genus(n, g).unwrap();
                let rhs = n * (2 * g - 2) + n * (n - 1) * (2 * g - 2);
                assert_eq!(2 * gs - 2, rhs);
            }
        }
        assert_eq!(spectral_genus(2, 2).unwrap(), 5);
        assert_eq!(spectral_genus(3, 2).unwrap(), 10);
    }

    #[test]
    fn quotient_genera() {
        assert_eq!(upp_genera(2, 2).unwrap(), (17, 7));
        // p = 1: the double cover is the full rank-2 spectral curve.
        for g in 2..=8 {
            let (top, _) = upp_genera(1, g).unwrap();
            assert_eq!(top, spectral_genus(2, g).unwrap());
        }
    }

    #[test]
    fn parabolic_dimension_examples() {
        assert_eq!(parabolic_moduli_dim(0, 2, 4).unwrap(), 2);
        assert_eq!(parabolic_moduli_dim(2, 1, 0).unwrap(), 4);
        assert_eq!(parabolic_moduli_dim(1, 2, 1).unwrap(), 4);
        assert!(parabolic_moduli_dim(0, 0, 4).is_err());
    }

    #[test]
    fn torsion_counts() {
        assert_eq!(torsion_two_count(0).unwrap(), 1);
        assert_eq!(torsion_two_count(3).unwrap(), 64);
        assert_eq!(torsion_two_count(5).unwrap(), 1024);
        assert!(torsion_two_count(64).is_err());
    }

    #[test]
    fn group_tag_json() {
        let g: Group = serde_json::from_str(r#"{"family":"GL","n":2}"#).unwrap();
        assert_eq!(g, Group::Gl { n: 2 });
        let s = serde_json::to_string(&Group::Sp { m: 4 }).unwrap();
        assert_eq!(s, r#"{"family":"Sp","m":4}"#);
    }
}
