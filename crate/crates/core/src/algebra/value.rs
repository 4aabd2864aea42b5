use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;

use super::prime::reduce_bigint;
use super::{AlgebraError, Integers, Matrix, MatrixRing, PrimeField, Ring};

/// The coefficient domain: a prime field or the integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RingSpec {
    PrimeField(u64),
    Integer,
}

impl RingSpec {
    /// Checks the modulus and returns the field for [`RingSpec::PrimeField`].
    pub fn field(&self) -> Result<Option<PrimeField>, AlgebraError> {
        match *self {
            RingSpec::PrimeField(p) => PrimeField::new(p).map(Some),
            RingSpec::Integer => Ok(None),
        }
    }

    /// Canonical representative of `v` in this domain.
    pub fn reduce(&self, v: &BigInt) -> BigInt {
        match *self {
            RingSpec::PrimeField(p) => BigInt::from(reduce_bigint(v, p)),
            RingSpec::Integer => v.clone(),
        }
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingSpec::PrimeField(p) => write!(f, "F_{p}"),
            RingSpec::Integer => write!(f, "Z"),
        }
    }
}

impl FromStr for RingSpec {
    type Err = AlgebraError;

    /// Accepts `int`, `integer`, `Z`, a prime `p` or `F_p`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        match t {
            "int" | "integer" | "Z" => return Ok(RingSpec::Integer),
            _ => {}
        }
        let digits = t.strip_prefix("F_").unwrap_or(t);
        let p: u64 = digits.parse().map_err(|_| AlgebraError::BadSpec(s.to_string()))?;
        PrimeField::new(p)?;
        Ok(RingSpec::PrimeField(p))
    }
}

/// A scalar or a square matrix over a [`RingSpec`], with canonical entries.
///
/// This is the dynamically checked value type used at input boundaries; the
/// algorithms themselves run over the typed rings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RingValue {
    Scalar { spec: RingSpec, value: BigInt },
    Matrix { spec: RingSpec, value: Matrix<BigInt> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RingOp {
    Add,
    Sub,
    Mul,
}

impl RingValue {
    pub fn scalar(spec: RingSpec, v: impl Into<BigInt>) -> Result<Self, AlgebraError> {
        spec.field()?;
        Ok(RingValue::Scalar { spec, value: spec.reduce(&v.into()) })
    }

    pub fn matrix(spec: RingSpec, rows: Vec<Vec<BigInt>>) -> Result<Self, AlgebraError> {
        spec.field()?;
        let d = rows.len();
        if d == 0 || rows.iter().any(|r| r.len() != d) {
            return Err(AlgebraError::DimensionMismatch {
                left: format!("{} rows", d),
                right: "square matrix with at least one row".into(),
            });
        }
        let rows = rows.into_iter().map(|r| r.iter().map(|x| spec.reduce(x)).collect()).collect();
        Ok(RingValue::Matrix { spec, value: Matrix::from_rows(rows) })
    }

    pub fn identity(spec: RingSpec, dim: usize) -> Result<Self, AlgebraError> {
        spec.field()?;
        if dim == 0 {
            return Err(AlgebraError::DimensionMismatch { left: "0".into(), right: "dimension >= 1".into() });
        }
        Ok(RingValue::Matrix { spec, value: Matrix::identity(&Integers, dim) })
    }

    pub fn spec(&self) -> RingSpec {
        match self {
            RingValue::Scalar { spec, .. } | RingValue::Matrix { spec, .. } => *spec,
        }
    }

    /// `None` for scalars.
    pub fn dim(&self) -> Option<usize> {
        match self {
            RingValue::Scalar { .. } => None,
            RingValue::Matrix { value, .. } => Some(value.rows()),
        }
    }

    fn shape_name(&self) -> String {
        match self.dim() {
            None => format!("scalar over {}", self.spec()),
            Some(d) => format!("{d}x{d} matrix over {}", self.spec()),
        }
    }
}

impl fmt::Display for RingValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingValue::Scalar { value, .. } => write!(f, "{value}"),
            RingValue::Matrix { value, .. } => {
                write!(f, "[")?;
                for r in 0..value.rows() {
                    if r > 0 {
                        write!(f, "; ")?;
                    }
                    let row: Vec<String> = value.row(r).iter().map(|x| x.to_string()).collect();
                    write!(f, "{}", row.join(" "))?;
                }
                write!(f, "]")
            }
        }
    }
}

fn apply<R: Ring>(ring: &R, a: &R::Elem, b: &R::Elem, op: RingOp) -> R::Elem {
    match op {
        RingOp::Add => ring.add(a, b),
        RingOp::Sub => ring.sub(a, b),
        RingOp::Mul => ring.mul(a, b),
    }
}

/// `a op b`, rejecting mixed rings and mixed shapes.
pub fn ring_arithmetic(a: &RingValue, b: &RingValue, op: RingOp) -> Result<RingValue, AlgebraError> {
    let spec = a.spec();
    if spec != b.spec() {
        return Err(AlgebraError::RingMismatch { left: spec, right: b.spec() });
    }
    if a.dim() != b.dim() {
        return Err(AlgebraError::DimensionMismatch { left: a.shape_name(), right: b.shape_name() });
    }
    let field = spec.field()?;
    Ok(match (a, b) {
        (RingValue::Scalar { value: x, .. }, RingValue::Scalar { value: y, .. }) => {
            let value = match field {
                Some(f) => {
                    let r = apply(&f, &reduce_bigint(x, f.modulus()), &reduce_bigint(y, f.modulus()), op);
                    BigInt::from(r)
                }
                None => apply(&Integers, x, y, op),
            };
            RingValue::Scalar { spec, value }
        }
        (RingValue::Matrix { value: x, .. }, RingValue::Matrix { value: y, .. }) => {
            let d = x.rows();
            let value = match field {
                Some(f) => {
                    let ring = MatrixRing::new(f, d);
                    let p = f.modulus();
                    let r = apply(&ring, &x.map(|v| reduce_bigint(v, p)), &y.map(|v| reduce_bigint(v, p)), op);
                    r.map(|&v| BigInt::from(v))
                }
                None => apply(&MatrixRing::new(Integers, d), x, y, op),
            };
            RingValue::Matrix { spec, value }
        }
        _ => unreachable!("dimensions already compared"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(rows: Vec<Vec<i64>>) -> Vec<Vec<BigInt>> {
        rows.into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect()
    }

    #[test]
    fn scalar_addition_reduces() {
        let f7 = RingSpec::PrimeField(7);
        let a = RingValue::scalar(f7, 5).unwrap();
        let b = RingValue::scalar(f7, 4).unwrap();
        assert_eq!(ring_arithmetic(&a, &b, RingOp::Add).unwrap(), RingValue::scalar(f7, 2).unwrap());
        let neg = RingValue::scalar(f7, -1).unwrap();
        assert_eq!(neg, RingValue::scalar(f7, 6).unwrap());
    }

    #[test]
    fn matrix_product_mod_five() {
        let f5 = RingSpec::PrimeField(5);
        let a = RingValue::matrix(f5, big(vec![vec![1, 2], vec![3, 4]])).unwrap();
        let b = RingValue::matrix(f5, big(vec![vec![0, 1], vec![1, 0]])).unwrap();
        let want = RingValue::matrix(f5, big(vec![vec![2, 1], vec![4, 3]])).unwrap();
        assert_eq!(ring_arithmetic(&a, &b, RingOp::Mul).unwrap(), want);
    }

    #[test]
    fn identity_is_neutral() {
        for spec in [RingSpec::Integer, RingSpec::PrimeField(11)] {
            let m = RingValue::matrix(spec, big(vec![vec![3, -2, 7], vec![0, 5, 1], vec![9, 9, -4]])).unwrap();
            let id = RingValue::identity(spec, 3).unwrap();
            assert_eq!(ring_arithmetic(&m, &id, RingOp::Mul).unwrap(), m);
            assert_eq!(ring_arithmetic(&id, &m, RingOp::Mul).unwrap(), m);
        }
    }

    #[test]
    fn mismatches_are_rejected() {
        let a = RingValue::scalar(RingSpec::Integer, 1).unwrap();
        let b = RingValue::scalar(RingSpec::PrimeField(7), 1).unwrap();
        assert!(matches!(ring_arithmetic(&a, &b, RingOp::Add), Err(AlgebraError::RingMismatch { .. })));
        let m2 = RingValue::identity(RingSpec::Integer, 2).unwrap();
        let m3 = RingValue::identity(RingSpec::Integer, 3).unwrap();
        assert!(matches!(ring_arithmetic(&m2, &m3, RingOp::Mul), Err(AlgebraError::DimensionMismatch { .. })));
        assert!(matches!(ring_arithmetic(&a, &m2, RingOp::Add), Err(AlgebraError::DimensionMismatch { .. })));
        assert!(RingValue::matrix(RingSpec::Integer, big(vec![vec![1, 2]])).is_err());
    }

    #[test]
    fn spec_parsing() {
        assert_eq!("int".parse::<RingSpec>().unwrap(), RingSpec::Integer);
        assert_eq!("1000003".parse::<RingSpec>().unwrap(), RingSpec::PrimeField(1000003));
        assert_eq!("F_7".parse::<RingSpec>().unwrap(), RingSpec::PrimeField(7));
        assert!("12".parse::<RingSpec>().is_err());
        assert!("abc".parse::<RingSpec>().is_err());
        assert_eq!(RingSpec::PrimeField(7).to_string(), "F_7");
    }
}
