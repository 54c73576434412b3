use serde::{Deserialize, Serialize};

use super::DiscreteJoint;
use crate::{Error, Result};

/// Largest domain the exact enumeration accepts.
pub const MAX_DOMAIN: usize = 16;
/// Largest function class the exact enumeration accepts.
pub const MAX_MEMBERS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LossKind {
    /// `‖u − v‖₁`: symmetric, obeys the triangle inequality.
    L1,
    /// `‖u − v‖₂²`: symmetric, but not a metric.
    L2,
}

impl LossKind {
    pub fn eval(self, u: &[f64], v: &[f64]) -> f64 {
        match self {
            LossKind::L1 => u.iter().zip(v).map(|(a, b)| (a - b).abs()).sum(),
            LossKind::L2 => u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum(),
        }
    }

    pub fn is_symmetric(self) -> bool {
        true
    }

    pub fn obeys_triangle_inequality(self) -> bool {
        matches!(self, LossKind::L1)
    }
}

/// An explicitly enumerated set of functions from a finite domain
/// `0..domain_size` into a finite set of points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionClass {
    domain_size: usize,
    codomain: Vec<Vec<f64>>,
    /// `members[k][x]` indexes into `codomain`.
    members: Vec<Vec<usize>>,
}

impl FunctionClass {
    pub fn new(domain_size: usize, codomain: Vec<Vec<f64>>, members: Vec<Vec<usize>>) -> Result<Self> {
        if domain_size == 0 || codomain.is_empty() {
            return Err(Error::InvalidDimensions("empty domain or codomain".into()));
        }
        if domain_size > MAX_DOMAIN {
            return Err(Error::ClassTooLarge(format!(
                "domain of size {domain_size} exceeds {MAX_DOMAIN}"
            )));
        }
        if members.len() > MAX_MEMBERS {
            return Err(Error::ClassTooLarge(format!(
                "{} members exceed {MAX_MEMBERS}",
                members.len()
            )));
        }
        let width = codomain[0].len();
        if codomain.iter().any(|c| c.len() != width) {
            return Err(Error::InvalidDimensions("ragged codomain".into()));
        }
        for m in &members {
            if m.len() != domain_size || m.iter().any(|&v| v >= codomain.len()) {
                return Err(Error::InvalidDimensions(format!("malformed member {m:?}")));
            }
        }
        Ok(Self {
            domain_size,
            codomain,
            members,
        })
    }

    /// Every function from the domain into the codomain.
    pub fn all_functions(domain_size: usize, codomain: Vec<Vec<f64>>) -> Result<Self> {
        let k = codomain.len();
        let count = (k as u128).checked_pow(domain_size as u32).unwrap_or(u128::MAX);
        if count > MAX_MEMBERS as u128 {
            return Err(Error::ClassTooLarge(format!(
                "{k}^{domain_size} functions exceed {MAX_MEMBERS}"
            )));
        }
        let members = (0..count as usize)
            .map(|mut code| {
                (0..domain_size)
                    .map(|_| {
                        let v = code % k;
                        code /= k;
                        v
                    })
                    .collect()
            })
            .collect();
        Self::new(domain_size, codomain, members)
    }

    /// Only the constant functions.
    pub fn constants(domain_size: usize, codomain: Vec<Vec<f64>>) -> Result<Self> {
        let members = (0..codomain.len()).map(|v| vec![v; domain_size]).collect();
        Self::new(domain_size, codomain, members)
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn codomain(&self) -> &[Vec<f64>] {
        &self.codomain
    }

    pub fn members(&self) -> &[Vec<usize>] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Value of member `k` at domain point `x`.
    pub fn apply(&self, k: usize, x: usize) -> &[f64] {
        &self.codomain[self.members[k][x]]
    }

    /// Index of a member equal to `table`, if present.
    pub fn position(&self, table: &[usize]) -> Option<usize> {
        self.members.iter().position(|m| m == table)
    }
}

/// Exact discrepancy together with a maximizing pair of class members.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub value: f64,
    pub witness: (usize, usize),
}

/// `sup_{c1,c2} |E_{D1} ℓ(c1, c2) − E_{D2} ℓ(c1, c2)|` by enumeration.
///
/// Both tables are read as distributions over the flattened class domain.
pub fn discrepancy(d1: &DiscreteJoint, d2: &DiscreteJoint, cls: &FunctionClass, loss: LossKind) -> Result<Discrepancy> {
    discrepancy_with(d1, d2, cls, |u, v| loss.eval(u, v))
}

/// [`discrepancy`] with an arbitrary pointwise loss.
pub fn discrepancy_with<F>(d1: &DiscreteJoint, d2: &DiscreteJoint, cls: &FunctionClass, loss: F) -> Result<Discrepancy>
where
    F: Fn(&[f64], &[f64]) -> f64,
{
    if d1.len() != cls.domain_size || d2.len() != cls.domain_size {
        return Err(Error::DomainMismatch(format!(
            "distributions of size {} and {} against a class domain of size {}",
            d1.len(),
            d2.len(),
            cls.domain_size
        )));
    }
    if cls.is_empty() {
        return Err(Error::InvalidDimensions("empty function class".into()));
    }
    let k = cls.codomain.len();
    let mut table = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            table[i * k + j] = loss(&cls.codomain[i], &cls.codomain[j]);
        }
    }
    let diff: Vec<f64> = d1.pmf().iter().zip(d2.pmf()).map(|(a, b)| a - b).collect();
    let mut best = Discrepancy {
        value: 0.0,
        witness: (0, 0),
    };
    for (i, c1) in cls.members.iter().enumerate() {
        for (j, c2) in cls.members.iter().enumerate() {
            let mut acc = 0.0;
            for x in 0..cls.domain_size {
                acc += diff[x] * table[c1[x] * k + c2[x]];
            }
            let v = acc.abs();
            if v > best.value {
                best = Discrepancy {
                    value: v,
                    witness: (i, j),
                };
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits() -> Vec<Vec<f64>> {
        vec![vec![0.0], vec![1.0]]
    }

    #[test]
    fn identical_distributions_have_zero_discrepancy() {
        let d = DiscreteJoint::new(vec![3], vec![0.2, 0.3, 0.5]).unwrap();
        let cls = FunctionClass::all_functions(3, bits()).unwrap();
        assert_eq!(discrepancy(&d, &d, &cls, LossKind::L1).unwrap().value, 0.0);
    }

    #[test]
    fn constant_class_sees_nothing() {
        let d1 = DiscreteJoint::new(vec![3], vec![1.0, 0.0, 0.0]).unwrap();
        let d2 = DiscreteJoint::new(vec![3], vec![0.0, 0.0, 1.0]).unwrap();
        let cls = FunctionClass::constants(3, vec![vec![0.0], vec![2.0], vec![5.0]]).unwrap();
        assert!(discrepancy(&d1, &d2, &cls, LossKind::L1).unwrap().value < 1e-15);
    }

    /// Domain {0,1}, all four binary maps, point masses at 0 and 1: by
    /// enumeration of the 16 ordered pairs the supremum is 1, attained by
    /// (identity, constant 0).
    #[test]
    fn point_masses_on_binary_domain() {
        let d1 = DiscreteJoint::new(vec![2], vec![1.0, 0.0]).unwrap();
        let d2 = DiscreteJoint::new(vec![2], vec![0.0, 1.0]).unwrap();
        let cls = FunctionClass::all_functions(2, bits()).unwrap();
        assert_eq!(cls.len(), 4);
        let r = discrepancy(&d1, &d2, &cls, LossKind::L1).unwrap();
        assert_eq!(r.value, 1.0);
        let identity = cls.position(&[0, 1]).unwrap();
        let zero = cls.position(&[0, 0]).unwrap();
        // (identity, constant 0) agree at 0 and differ at 1
        let at = |k: usize, x: usize| cls.apply(k, x)[0];
        let named = ((at(identity, 0) - at(zero, 0)).abs() - (at(identity, 1) - at(zero, 1)).abs()).abs();
        assert_eq!(named, r.value);
        let (a, b) = r.witness;
        let found = ((at(a, 0) - at(b, 0)).abs() - (at(a, 1) - at(b, 1)).abs()).abs();
        assert_eq!(found, r.value);
    }

    #[test]
    fn enumeration_caps() {
        assert!(matches!(
            FunctionClass::all_functions(13, bits()),
            Err(Error::ClassTooLarge(_))
        ));
        assert!(FunctionClass::all_functions(12, bits()).is_ok());
        assert!(matches!(
            FunctionClass::constants(17, bits()),
            Err(Error::ClassTooLarge(_))
        ));
        let d = DiscreteJoint::uniform(vec![3]).unwrap();
        let cls = FunctionClass::all_functions(2, bits()).unwrap();
        assert!(matches!(
            discrepancy(&d, &d, &cls, LossKind::L1),
            Err(Error::DomainMismatch(_))
        ));
    }

    #[test]
    fn pseudometric_on_enumerated_triples() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let cls = FunctionClass::all_functions(4, vec![vec![0.0], vec![0.5], vec![1.0]]).unwrap();
        let draw = |rng: &mut rand_chacha::ChaCha8Rng| {
            DiscreteJoint::from_weights(vec![4], (0..4).map(|_| rng.random::<f64>()).collect()).unwrap()
        };
        for _ in 0..20 {
            let (p, q, r) = (draw(&mut rng), draw(&mut rng), draw(&mut rng));
            let d = |a: &DiscreteJoint, b: &DiscreteJoint| discrepancy(a, b, &cls, LossKind::L1).unwrap().value;
            assert!((d(&p, &q) - d(&q, &p)).abs() < 1e-15);
            assert!(d(&p, &r) <= d(&p, &q) + d(&q, &r) + 1e-12);
        }
    }
}
