//! Seeded random structured instances for experiments and tests.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::linalg::CMat;
use crate::perturb::{project_structure, PerturbationTuple};
use crate::rmp::{RationalScalarFn, Rmp, StructureTag, Term, Tolerances};

pub fn random_matrix(n: usize, rng: &mut impl Rng) -> CMat {
    CMat::from_fn(n, n, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// A weight compatible with `tag`; `j` alternates between the admissible kinds.
pub fn random_weight(tag: StructureTag, d: usize, j: usize, rng: &mut impl Rng) -> RationalScalarFn {
    let a: f64 = rng.random_range(1.5..3.0);
    let scale: f64 = rng.random_range(0.5..1.5);
    let w = match tag {
        StructureTag::TEven | StructureTag::TOdd | StructureTag::StarEven | StructureTag::StarOdd => {
            // Even 1/(z²+a) or odd z/(z²+a).
            if j % 2 == 0 {
                RationalScalarFn::real(&[scale], &[a, 0.0, 1.0])
            } else {
                RationalScalarFn::real(&[0.0, scale], &[a, 0.0, 1.0])
            }
        }
        StructureTag::StarPalindromic | StructureTag::TPalindromic => {
            // z^{(d+1)/2}/(z+1) for odd d, z^{(d+2)/2}/((z+a)(az+1)) for even d.
            if d % 2 == 1 {
                let mut s = vec![0.0; d.div_ceil(2) + 1];
                s[d.div_ceil(2)] = scale;
                RationalScalarFn::real(&s, &[1.0, 1.0])
            } else {
                let mut s = vec![0.0; d / 2 + 2];
                s[d / 2 + 1] = scale;
                RationalScalarFn::real(&s, &[a, a * a + 1.0, a])
            }
        }
        _ => RationalScalarFn::real(&[scale], &[a, 1.0]),
    };
    w.expect("nonzero denominator")
}

/// A random RMP of the given size carrying `tag`.
pub fn random_instance(tag: StructureTag, n: usize, d: usize, k: usize, rng: &mut impl Rng) -> Result<Rmp> {
    let a = (0..=d).map(|_| random_matrix(n, rng)).collect();
    let terms = (0..k).map(|j| Term { w: random_weight(tag, d, j, rng), e: random_matrix(n, rng) }).collect();
    let g = Rmp::new(a, terms)?;
    let t = project_structure(&g, tag, &PerturbationTuple::zeroing(&g), &Tolerances::default())?;
    g.with_blocks(t.blocks().cloned().collect())
}

/// A random evaluation point admissible for `tag` (off the real axis, off the
/// unit circle and away from the poles of the generated weights).
pub fn random_lambda(tag: StructureTag, rng: &mut impl Rng) -> Complex64 {
    let r: f64 = match tag {
        StructureTag::StarPalindromic | StructureTag::TPalindromic => {
            if rng.random_bool(0.5) {
                rng.random_range(0.35..0.8)
            } else {
                rng.random_range(1.25..2.2)
            }
        }
        _ => rng.random_range(0.3..1.2),
    };
    let th: f64 = rng.random_range(0.15..std::f64::consts::PI - 0.15);
    let th = if rng.random_bool(0.5) { th } else { -th };
    Complex64::from_polar(r, th)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rmp::validate_structure;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_instances_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for tag in StructureTag::ALL {
            for d in 0..=3 {
                let g = random_instance(tag, 3, d, 2, &mut rng).unwrap();
                let rep = validate_structure(&g, tag, 1e-10);
                assert!(rep.ok, "{tag} d={d}: {:?}", rep.violations);
            }
        }
    }
}
