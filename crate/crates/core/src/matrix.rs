use crate::curve::EllipticCurve;
use crate::error::ArithError;
use crate::function::CurveFunction;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::Mul;

/// 2x2 matrix with entries in the function field of the curve. Row-major:
/// [[a, b], [c, d]].
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FnMatrix {
    pub entries: [[CurveFunction; 2]; 2],
}

impl FnMatrix {
    pub fn new(entries: [[CurveFunction; 2]; 2]) -> Self {
        FnMatrix { entries }
    }

    pub fn identity(curve: EllipticCurve) -> Self {
        let one = CurveFunction::one(curve);
        let zero = CurveFunction::zero(curve);
        FnMatrix {
            entries: [[one.clone(), zero.clone()], [zero, one]],
        }
    }

    /// diag(f, g)
    pub fn diagonal(f: CurveFunction, g: CurveFunction) -> Self {
        let curve = f.curve();
        let zero = CurveFunction::zero(curve);
        FnMatrix { entries: [[f, zero.clone()], [zero, g]] }
    }

    pub fn curve(&self) -> EllipticCurve {
        self.entries[0][0].curve()
    }

    pub fn at(&self, i: usize, j: usize) -> &CurveFunction {
        &self.entries[i][j]
    }

    pub fn det(&self) -> CurveFunction {
        let e = &self.entries;
        &(&e[0][0] * &e[1][1]) - &(&e[0][1] * &e[1][0])
    }

    pub fn is_invertible(&self) -> bool {
        !self.det().is_zero()
    }

    /// Exact inverse via the adjugate. Errors when the determinant vanishes
    /// identically.
    pub fn inv(&self) -> Result<FnMatrix, ArithError> {
        let d = self.det();
        let di = d.inv()?;
        let e = &self.entries;
        Ok(FnMatrix {
            entries: [
                [&e[1][1] * &di, &(-&e[0][1]) * &di],
                [&(-&e[1][0]) * &di, &e[0][0] * &di],
            ],
        })
    }

    pub fn transpose(&self) -> FnMatrix {
        let e = &self.entries;
        FnMatrix {
            entries: [
                [e[0][0].clone(), e[1][0].clone()],
                [e[0][1].clone(), e[1][1].clone()],
            ],
        }
    }

    /// Matrix action on a coordinate pair (column vector).
    pub fn apply(&self, u: &CurveFunction, v: &CurveFunction) -> (CurveFunction, CurveFunction) {
        let e = &self.entries;
        (
            &(&e[0][0] * u) + &(&e[0][1] * v),
            &(&e[1][0] * u) + &(&e[1][1] * v),
        )
    }

    pub fn scale(&self, f: &CurveFunction) -> FnMatrix {
        let e = &self.entries;
        FnMatrix {
            entries: [
                [&e[0][0] * f, &e[0][1] * f],
                [&e[1][0] * f, &e[1][1] * f],
            ],
        }
    }
}

impl Mul for &FnMatrix {
    type Output = FnMatrix;
    fn mul(self, other: &FnMatrix) -> FnMatrix {
        let a = &self.entries;
        let b = &other.entries;
        let ent = |i: usize, j: usize| -> CurveFunction {
            &(&a[i][0] * &b[0][j]) + &(&a[i][1] * &b[1][j])
        };
        FnMatrix {
            entries: [[ent(0, 0), ent(0, 1)], [ent(1, 0), ent(1, 1)]],
        }
    }
}

impl fmt::Debug for FnMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = &self.entries;
        write!(
            f,
            "[[{:?}, {:?}], [{:?}, {:?}]]",
            e[0][0], e[0][1], e[1][0], e[1][1]
        )
    }
}
