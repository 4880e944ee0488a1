//! The automorphism-group atlas: connected fibration-preserving groups of
//! the ruled surfaces over an elliptic base, the Klein kernel of the
//! Segre-one bundle, the classification of maximal connected groups across
//! all surface classes, and human-readable maximality certificates.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bundle::BundleModel;
use crate::curve::{CurvePoint, EllipticCurve};
use crate::descriptor::{descriptor_of_model, SurfaceDescriptor};
use crate::error::AutError;
use crate::field::Fp;
use crate::transform::{chain_theorem_a, ChainCenters, ChainCertificate};

/// Shape of the connected group (or of its fiberwise kernel, when the
/// group surjects onto translations of the base).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AutKernel {
    /// Multiplicative group of the line.
    Gm,
    /// Additive group of the line.
    Ga,
    /// The four constant involutions forming a Klein group in PGL2.
    TwoTorsionKlein,
    TrivialGroup,
    FullPGL2,
    /// Translations times PGL2, for the product surface.
    ProductCxPGL2,
    #[serde(rename = "PGL3")]
    Pgl3,
    /// Translations of an abelian surface by itself.
    WholeAbelianSurface,
    /// Translations by an elliptic curve.
    EllipticCurveGroup,
}

impl AutKernel {
    pub fn dimension(&self) -> u32 {
        match self {
            AutKernel::Gm | AutKernel::Ga | AutKernel::EllipticCurveGroup => 1,
            AutKernel::TwoTorsionKlein | AutKernel::TrivialGroup => 0,
            AutKernel::FullPGL2 => 3,
            AutKernel::ProductCxPGL2 => 4,
            AutKernel::Pgl3 => 8,
            AutKernel::WholeAbelianSurface => 2,
        }
    }

    pub fn is_commutative(&self) -> bool {
        !matches!(
            self,
            AutKernel::FullPGL2 | AutKernel::ProductCxPGL2 | AutKernel::Pgl3
        )
    }
}

impl fmt::Display for AutKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AutKernel::Gm => "Gm",
            AutKernel::Ga => "Ga",
            AutKernel::TwoTorsionKlein => "TwoTorsionKlein",
            AutKernel::TrivialGroup => "TrivialGroup",
            AutKernel::FullPGL2 => "FullPGL2",
            AutKernel::ProductCxPGL2 => "ProductCxPGL2",
            AutKernel::Pgl3 => "PGL3",
            AutKernel::WholeAbelianSurface => "WholeAbelianSurface",
            AutKernel::EllipticCurveGroup => "EllipticCurveGroup",
        };
        f.write_str(s)
    }
}

/// Image of the connected group in the automorphisms of the base.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AutQuotient {
    /// The full translation group of the base curve.
    EllipticCurve,
    Point,
}

impl AutQuotient {
    pub fn dimension(&self) -> u32 {
        match self {
            AutQuotient::EllipticCurve => 1,
            AutQuotient::Point => 0,
        }
    }
}

impl fmt::Display for AutQuotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AutQuotient::EllipticCurve => "EllipticCurve",
            AutQuotient::Point => "Point",
        })
    }
}

/// Whether the kernel-quotient extension splits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Splits {
    Yes,
    No,
    NotApplicable,
}

impl fmt::Display for Splits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Splits::Yes => "yes",
            Splits::No => "no",
            Splits::NotApplicable => "n/a",
        })
    }
}

/// Description of the connected fibration-preserving automorphism group.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AutDescription {
    pub dimension: u32,
    /// Group shape; `None` when the class does not pin one of the listed
    /// shapes down (descent-chain classes and their relatives).
    pub kernel: Option<AutKernel>,
    pub quotient: AutQuotient,
    pub commutative: bool,
    pub splits: Splits,
    pub maximal: bool,
    /// For non-maximal split bundles: the descent chain whose strictly
    /// dropping Segre invariants witness the strictly growing groups.
    pub chain_witness: Option<ChainCertificate>,
}

impl fmt::Display for AutDescription {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kernel = self
            .kernel
            .map_or("none".to_string(), |k| k.to_string());
        write!(
            f,
            "dimension {}, kernel {}, quotient {}, commutative {}, splits {}, maximal {}",
            self.dimension, kernel, self.quotient, self.commutative, self.splits, self.maximal
        )?;
        if let Some(w) = &self.chain_witness {
            write!(f, "\n{w}")?;
        }
        Ok(())
    }
}

/// Number of descent steps recorded when a non-maximal split bundle needs
/// a witness chain.
const CHAIN_WITNESS_STEPS: u32 = 3;

/// Connected fibration-preserving automorphism group of a ruled surface.
pub fn aut_of_bundle(desc: &SurfaceDescriptor) -> Result<AutDescription, AutError> {
    match desc {
        SurfaceDescriptor::TrivialBundle(_) => Ok(AutDescription {
            dimension: 4,
            kernel: Some(AutKernel::ProductCxPGL2),
            quotient: AutQuotient::Point,
            commutative: false,
            splits: Splits::NotApplicable,
            maximal: true,
            chain_witness: None,
        }),
        SurfaceDescriptor::Decomposable(curve, class) => {
            if class.degree == 0 {
                // Fiberwise scalings, extended by all base translations; the
                // extension is the semiabelian group classified by the
                // nontrivial class point, so it does not split.
                Ok(AutDescription {
                    dimension: 2,
                    kernel: Some(AutKernel::Gm),
                    quotient: AutQuotient::EllipticCurve,
                    commutative: true,
                    splits: Splits::No,
                    maximal: true,
                    chain_witness: None,
                })
            } else {
                // Scalings extended by the unipotent maps with parameters in
                // the global sections of the class line bundle: a connected
                // solvable group of dimension degree + 1, fixing the base
                // pointwise, and never maximal; the descent chain witnesses
                // a strictly larger group one transformation away.
                let start = SurfaceDescriptor::decomposable(*curve, *class);
                let witness =
                    chain_theorem_a(&start, CHAIN_WITNESS_STEPS, &ChainCenters::Seeded(0))?;
                Ok(AutDescription {
                    dimension: u32::try_from(class.degree).unwrap_or(u32::MAX) + 1,
                    kernel: None,
                    quotient: AutQuotient::Point,
                    commutative: false,
                    splits: Splits::NotApplicable,
                    maximal: false,
                    chain_witness: Some(witness),
                })
            }
        }
        SurfaceDescriptor::Atiyah0(_) => Ok(AutDescription {
            // The unipotent line, extended by all base translations: the
            // universal vectorial extension of the base, which is nonsplit.
            dimension: 2,
            kernel: Some(AutKernel::Ga),
            quotient: AutQuotient::EllipticCurve,
            commutative: true,
            splits: Splits::No,
            maximal: true,
            chain_witness: None,
        }),
        SurfaceDescriptor::Atiyah1(curve) => {
            let torsion = curve.two_torsion();
            if !torsion.complete || torsion.points.len() < 4 {
                return Err(AutError::CharTwoOutOfScope);
            }
            // The Klein kernel of constant involutions, extended by the
            // translations: a connected one-dimensional group mapping onto
            // the base through a degree-four isogeny, hence nonsplit.
            Ok(AutDescription {
                dimension: 1,
                kernel: Some(AutKernel::TwoTorsionKlein),
                quotient: AutQuotient::EllipticCurve,
                commutative: true,
                splits: Splits::No,
                maximal: true,
                chain_witness: None,
            })
        }
        SurfaceDescriptor::Hirzebruch(n) => Ok(AutDescription {
            dimension: if *n == 0 { 6 } else { n + 5 },
            kernel: None,
            quotient: AutQuotient::Point,
            commutative: false,
            splits: Splits::NotApplicable,
            maximal: *n != 1,
            chain_witness: None,
        }),
        SurfaceDescriptor::GenusAtLeastTwoTrivial(_) => Ok(AutDescription {
            // The base has no connected automorphisms, so the group is the
            // fiber one: all of PGL2 on the product.
            dimension: 3,
            kernel: Some(AutKernel::FullPGL2),
            quotient: AutQuotient::Point,
            commutative: false,
            splits: Splits::NotApplicable,
            maximal: true,
            chain_witness: None,
        }),
    }
}

/// Minimal rational surfaces, as inputs to the classification.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RationalMinimalKind {
    ProjectivePlane,
    Hirzebruch(u32),
}

/// Surface classes whose connected automorphism groups the classification
/// decides, spanning every Enriques-Kodaira type that can occur.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SurfaceClass {
    RationalMinimal(RationalMinimalKind),
    RationalNonMinimal,
    RuledElliptic(SurfaceDescriptor),
    /// Ruled over a base of genus at least two; the flag records whether
    /// the bundle is the trivial product.
    RuledHigherGenus(bool),
    Abelian,
    BlownUpAbelian,
    K3,
    Enriques,
    BiellipticWithP1Quotient,
    /// Properly elliptic surfaces arising as quotients; the flag records
    /// whether the distinguished curve direction survives the quotient.
    QuotientProperlyElliptic(bool),
    ProperlyEllipticOther,
    GeneralType,
}

impl fmt::Display for SurfaceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurfaceClass::RationalMinimal(RationalMinimalKind::ProjectivePlane) => {
                write!(f, "rational minimal: projective plane")
            }
            SurfaceClass::RationalMinimal(RationalMinimalKind::Hirzebruch(n)) => {
                write!(f, "rational minimal: F{n}")
            }
            SurfaceClass::RationalNonMinimal => write!(f, "rational, non-minimal"),
            SurfaceClass::RuledElliptic(d) => write!(f, "ruled over an elliptic curve: {d}"),
            SurfaceClass::RuledHigherGenus(true) => {
                write!(f, "trivial ruled surface over genus >= 2")
            }
            SurfaceClass::RuledHigherGenus(false) => {
                write!(f, "nontrivial ruled surface over genus >= 2")
            }
            SurfaceClass::Abelian => write!(f, "abelian surface"),
            SurfaceClass::BlownUpAbelian => write!(f, "blown-up abelian surface"),
            SurfaceClass::K3 => write!(f, "K3 surface"),
            SurfaceClass::Enriques => write!(f, "Enriques surface"),
            SurfaceClass::BiellipticWithP1Quotient => {
                write!(f, "bielliptic surface with rational quotient")
            }
            SurfaceClass::QuotientProperlyElliptic(true) => {
                write!(f, "properly elliptic quotient, curve direction preserved")
            }
            SurfaceClass::QuotientProperlyElliptic(false) => {
                write!(f, "properly elliptic quotient, curve direction destroyed")
            }
            SurfaceClass::ProperlyEllipticOther => write!(f, "properly elliptic, other"),
            SurfaceClass::GeneralType => write!(f, "general type"),
        }
    }
}

fn fixed_row(
    dimension: u32,
    kernel: AutKernel,
    commutative: bool,
    maximal: bool,
) -> AutDescription {
    AutDescription {
        dimension,
        kernel: Some(kernel),
        quotient: AutQuotient::Point,
        commutative,
        splits: Splits::NotApplicable,
        maximal,
        chain_witness: None,
    }
}

/// Connected automorphism group for every surface class, with the verdict
/// on whether that group is maximal among connected groups acting on any
/// smooth surface in its birational class.
pub fn classify_theorem_d(class: &SurfaceClass) -> Result<AutDescription, AutError> {
    match class {
        SurfaceClass::RationalMinimal(RationalMinimalKind::ProjectivePlane) => {
            Ok(fixed_row(8, AutKernel::Pgl3, false, true))
        }
        SurfaceClass::RationalMinimal(RationalMinimalKind::Hirzebruch(n)) => {
            aut_of_bundle(&SurfaceDescriptor::Hirzebruch(*n))
        }
        SurfaceClass::RationalNonMinimal => Ok(AutDescription {
            // The class never carries a maximal group: contracting an
            // exceptional curve enlarges it. Shape and dimension depend on
            // the configuration, which the tag does not carry.
            dimension: 0,
            kernel: None,
            quotient: AutQuotient::Point,
            commutative: false,
            splits: Splits::NotApplicable,
            maximal: false,
            chain_witness: None,
        }),
        SurfaceClass::RuledElliptic(desc) => aut_of_bundle(desc),
        SurfaceClass::RuledHigherGenus(true) => {
            aut_of_bundle(&SurfaceDescriptor::GenusAtLeastTwoTrivial(2))
        }
        SurfaceClass::RuledHigherGenus(false) => Ok(AutDescription {
            // Nontrivial bundles over a genus >= 2 base always sit below
            // the product's full PGL2; the exact group depends on the
            // bundle, which the tag does not carry.
            dimension: 0,
            kernel: None,
            quotient: AutQuotient::Point,
            commutative: false,
            splits: Splits::NotApplicable,
            maximal: false,
            chain_witness: None,
        }),
        SurfaceClass::Abelian => Ok(fixed_row(2, AutKernel::WholeAbelianSurface, true, true)),
        SurfaceClass::BlownUpAbelian => Ok(fixed_row(0, AutKernel::TrivialGroup, true, false)),
        SurfaceClass::K3 => Ok(fixed_row(0, AutKernel::TrivialGroup, true, true)),
        SurfaceClass::Enriques => Ok(fixed_row(0, AutKernel::TrivialGroup, true, true)),
        SurfaceClass::BiellipticWithP1Quotient => {
            Ok(fixed_row(1, AutKernel::EllipticCurveGroup, true, true))
        }
        SurfaceClass::QuotientProperlyElliptic(true) => {
            Ok(fixed_row(1, AutKernel::EllipticCurveGroup, true, true))
        }
        SurfaceClass::QuotientProperlyElliptic(false) => {
            Ok(fixed_row(0, AutKernel::TrivialGroup, true, false))
        }
        SurfaceClass::ProperlyEllipticOther => Ok(fixed_row(0, AutKernel::TrivialGroup, true, true)),
        SurfaceClass::GeneralType => Ok(fixed_row(0, AutKernel::TrivialGroup, true, true)),
    }
}

/// One constant 2x2 matrix entry of the Klein kernel.
type ConstMatrix = [[Fp; 2]; 2];

fn mat_mul(p: u64, a: &ConstMatrix, b: &ConstMatrix) -> ConstMatrix {
    let zero = Fp::zero(p);
    let mut out = [[zero; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn mat_neg(a: &ConstMatrix) -> ConstMatrix {
    [[-a[0][0], -a[0][1]], [-a[1][0], -a[1][1]]]
}

/// Index of `m` in `basis` up to sign, if any.
fn projective_index(basis: &[ConstMatrix; 4], m: &ConstMatrix) -> Option<usize> {
    basis
        .iter()
        .position(|b| *b == *m || mat_neg(b) == *m)
}

fn mat_to_string(m: &ConstMatrix) -> String {
    format!(
        "[[{}, {}], [{}, {}]]",
        m[0][0], m[0][1], m[1][0], m[1][1]
    )
}

/// Verification record for the Klein kernel of the Segre-one bundle.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DeltaKernelReport {
    /// The rational two-torsion points, origin included.
    pub torsion: Vec<CurvePoint>,
    /// The four involution matrices, printed.
    pub matrices: Vec<String>,
    /// table[i][j] = k with d_i d_j = +/- d_k; the group law of the Klein
    /// four-group under the xor indexing.
    pub table: [[usize; 4]; 4],
    pub commutes_projectively: bool,
    pub squares_are_scalar: bool,
}

impl DeltaKernelReport {
    /// True when the four matrices form a Klein four-group in PGL2.
    pub fn verified(&self) -> bool {
        if !self.commutes_projectively || !self.squares_are_scalar {
            return false;
        }
        for i in 0..4 {
            for j in 0..4 {
                if self.table[i][j] != i ^ j {
                    return false;
                }
            }
        }
        true
    }
}

impl fmt::Display for DeltaKernelReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "two-torsion: {}", point_list(&self.torsion))?;
        for (i, m) in self.matrices.iter().enumerate() {
            writeln!(f, "d{i} = {m}")?;
        }
        writeln!(f, "product table (indices, up to sign):")?;
        for row in &self.table {
            writeln!(f, "  {} {} {} {}", row[0], row[1], row[2], row[3])?;
        }
        write!(
            f,
            "commutes projectively: {}; squares scalar: {}; Klein four-group: {}",
            self.commutes_projectively,
            self.squares_are_scalar,
            self.verified()
        )
    }
}

fn point_list(pts: &[CurvePoint]) -> String {
    pts.iter()
        .map(|p| p.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Verifies that the four constant involutions attached to the rational
/// two-torsion close into a Klein four-group inside PGL2: products land
/// back in the set up to sign, under the xor table; all pairs commute
/// projectively; all squares are scalar. Demands fully rational
/// two-torsion, matching the kernel of the Segre-one bundle.
pub fn delta_kernel_check(curve: &EllipticCurve) -> Result<DeltaKernelReport, AutError> {
    let torsion = curve.two_torsion();
    if !torsion.complete || torsion.points.len() < 4 {
        return Err(AutError::IncompleteTorsion);
    }
    let p = curve.modulus();
    let one = Fp::one(p);
    let zero = Fp::zero(p);
    let deltas: [ConstMatrix; 4] = [
        [[one, zero], [zero, one]],
        [[-one, zero], [zero, one]],
        [[zero, one], [one, zero]],
        [[zero, -one], [one, zero]],
    ];
    let mut table = [[usize::MAX; 4]; 4];
    let mut commutes = true;
    let mut squares = true;
    for i in 0..4 {
        for j in 0..4 {
            let ij = mat_mul(p, &deltas[i], &deltas[j]);
            let ji = mat_mul(p, &deltas[j], &deltas[i]);
            if ij != ji && mat_neg(&ij) != ji {
                commutes = false;
            }
            match projective_index(&deltas, &ij) {
                Some(k) => table[i][j] = k,
                None => {
                    return Err(AutError::NotMaximalClass(
                        "involution products escaped the Klein set".into(),
                    ))
                }
            }
        }
        let sq = mat_mul(p, &deltas[i], &deltas[i]);
        if projective_index(&deltas, &sq) != Some(0) {
            squares = false;
        }
    }
    Ok(DeltaKernelReport {
        torsion: torsion.points.clone(),
        matrices: deltas.iter().map(mat_to_string).collect(),
        table,
        commutes_projectively: commutes,
        squares_are_scalar: squares,
    })
}

/// A human-readable argument that the connected group of the given class
/// is maximal, combining the structural reasons with, for the split
/// degree-zero case, a computed up-and-down pair of transformations whose
/// classifications return to the starting descriptor.
pub fn maximality_certificate(desc: &SurfaceDescriptor) -> Result<String, AutError> {
    let description = aut_of_bundle(desc)?;
    if !description.maximal {
        return Err(AutError::NotMaximalClass(format!(
            "{desc} has connected group of dimension {}, which embeds into a strictly \
             larger group after one elementary transformation; see the descent chain",
            description.dimension
        )));
    }
    let mut lines = vec![format!("class {desc}: {description}")];
    match desc {
        SurfaceDescriptor::TrivialBundle(_) => {
            lines.push(
                "the product surface carries translations of the base times the full \
                 fiber group; any larger connected group would move some fiber class \
                 of square zero into a different one, which intersection numbers forbid"
                    .into(),
            );
        }
        SurfaceDescriptor::Decomposable(curve, class) => {
            lines.push(
                "the two split sections are the only extremal curves, so every \
                 automorphism permutes them and the connected group fixes both; \
                 the scalings between them extend by every base translation"
                    .into(),
            );
            lines.push(
                "stability under elementary transformations: going up one fiber and \
                 back down at the contraction point lands on the same descriptor, so \
                 no transformation enlarges the group:"
                    .into(),
            );
            let model = BundleModel::decomposable(*curve, *class)
                .map_err(crate::error::TransformError::from)?;
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            // A center on one split section, then the inverse move at the
            // contraction point of the new fiber.
            let z = curve
                .points()
                .into_iter()
                .find(|pt| !pt.is_infinity())
                .expect("an elliptic curve has affine rational points");
            let side = crate::bundle::BundleSection::at_infinity(*curve);
            let center = model.section_value(&side, &z).map_err(crate::error::TransformError::from)?;
            let up = model.elm(z, &center, &mut rng)?;
            let mid = descriptor_of_model(&up.model)?;
            let down = up.model.elm(z, &up.contraction, &mut rng)?;
            let back = descriptor_of_model(&down.model)?;
            lines.push(format!("  up at {z}: {mid}"));
            lines.push(format!("  down at the contraction point: {back}"));
            if back != *desc {
                return Err(AutError::NotMaximalClass(format!(
                    "the up-and-down composite moved {desc} to {back}, \
                     so the class is not stable"
                )));
            }
        }
        SurfaceDescriptor::Atiyah0(_) => {
            lines.push(
                "the unique extremal section is preserved, the unipotent parameters \
                 form the full line, and the translation extension is the universal \
                 vectorial one; no fibration-preserving group properly contains it"
                    .into(),
            );
        }
        SurfaceDescriptor::Atiyah1(curve) => {
            let report = delta_kernel_check(curve)?;
            lines.push(
                "the kernel over the base translations is the Klein group of constant \
                 involutions attached to the rational two-torsion:"
                    .into(),
            );
            lines.push(format!("{report}"));
        }
        SurfaceDescriptor::Hirzebruch(n) => {
            lines.push(format!(
                "the section of square -{n} is unique for n >= 1 (both rulings are \
                 preserved for n = 0), so the group is the full connected fiber-and-base \
                 one of dimension {}",
                description.dimension
            ));
        }
        SurfaceDescriptor::GenusAtLeastTwoTrivial(_) => {
            lines.push(
                "a base of general type has no connected automorphisms, and the fiber \
                 factor already carries all of PGL2"
                    .into(),
            );
        }
    }
    Ok(lines.join("\n"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divisor::DivisorClass;

    fn curve11() -> EllipticCurve {
        EllipticCurve::new(11, -1, 0).unwrap()
    }

    fn pt(curve: &EllipticCurve, x: i64, y: i64) -> CurvePoint {
        let p = curve.modulus();
        let pt = CurvePoint::Affine(Fp::new(x, p), Fp::new(y, p));
        curve.check(&pt).unwrap();
        pt
    }

    fn dec(curve: EllipticCurve, d: i64, s: CurvePoint) -> SurfaceDescriptor {
        SurfaceDescriptor::decomposable(curve, DivisorClass { degree: d, sum: s })
    }

    #[test]
    fn bundle_rows_match_the_table() {
        let e = curve11();
        let s = pt(&e, 4, 4);
        let t = aut_of_bundle(&SurfaceDescriptor::TrivialBundle(e)).unwrap();
        assert_eq!(
            (t.dimension, t.kernel, t.quotient, t.commutative, t.splits, t.maximal),
            (4, Some(AutKernel::ProductCxPGL2), AutQuotient::Point, false, Splits::NotApplicable, true)
        );
        let d0 = aut_of_bundle(&dec(e, 0, s)).unwrap();
        assert_eq!(
            (d0.dimension, d0.kernel, d0.quotient, d0.commutative, d0.splits, d0.maximal),
            (2, Some(AutKernel::Gm), AutQuotient::EllipticCurve, true, Splits::No, true)
        );
        let a0 = aut_of_bundle(&SurfaceDescriptor::Atiyah0(e)).unwrap();
        assert_eq!(
            (a0.dimension, a0.kernel, a0.splits, a0.maximal),
            (2, Some(AutKernel::Ga), Splits::No, true)
        );
        let a1 = aut_of_bundle(&SurfaceDescriptor::Atiyah1(e)).unwrap();
        assert_eq!(
            (a1.dimension, a1.kernel, a1.quotient, a1.maximal),
            (1, Some(AutKernel::TwoTorsionKlein), AutQuotient::EllipticCurve, true)
        );
        for d in 1..=4 {
            let row = aut_of_bundle(&dec(e, d, s)).unwrap();
            assert_eq!(row.dimension as i64, d + 1);
            assert!(!row.maximal);
            let witness = row.chain_witness.expect("non-maximal rows carry a chain");
            assert_eq!(witness.steps.len(), CHAIN_WITNESS_STEPS as usize);
            assert!(witness.steps.iter().all(|s| s.gamma_exists));
        }
        assert_eq!(aut_of_bundle(&SurfaceDescriptor::Hirzebruch(0)).unwrap().dimension, 6);
        assert_eq!(aut_of_bundle(&SurfaceDescriptor::Hirzebruch(3)).unwrap().dimension, 8);
        assert!(!aut_of_bundle(&SurfaceDescriptor::Hirzebruch(1)).unwrap().maximal);
        let g = aut_of_bundle(&SurfaceDescriptor::GenusAtLeastTwoTrivial(2)).unwrap();
        assert_eq!((g.dimension, g.kernel), (3, Some(AutKernel::FullPGL2)));
    }

    /// The Segre-one row needs all of the two-torsion rational.
    #[test]
    fn incomplete_torsion_is_out_of_scope() {
        // y^2 = x^3 + 3x + 4 over F_7 keeps two of the four two-torsion
        // points irrational: the cubic has a single rational root.
        let e = EllipticCurve::new(7, 3, 4).unwrap();
        assert!(!e.two_torsion().complete);
        assert!(matches!(
            aut_of_bundle(&SurfaceDescriptor::Atiyah1(e)),
            Err(AutError::CharTwoOutOfScope)
        ));
        assert!(matches!(delta_kernel_check(&e), Err(AutError::IncompleteTorsion)));
    }

    #[test]
    fn dimension_splits_as_kernel_plus_quotient() {
        let e = curve11();
        let s = pt(&e, 4, 4);
        let rows = vec![
            SurfaceClass::RationalMinimal(RationalMinimalKind::ProjectivePlane),
            SurfaceClass::RationalMinimal(RationalMinimalKind::Hirzebruch(0)),
            SurfaceClass::RationalMinimal(RationalMinimalKind::Hirzebruch(1)),
            SurfaceClass::RationalMinimal(RationalMinimalKind::Hirzebruch(2)),
            SurfaceClass::RationalNonMinimal,
            SurfaceClass::RuledElliptic(SurfaceDescriptor::TrivialBundle(e)),
            SurfaceClass::RuledElliptic(dec(e, 0, s)),
            SurfaceClass::RuledElliptic(dec(e, 2, s)),
            SurfaceClass::RuledElliptic(SurfaceDescriptor::Atiyah0(e)),
            SurfaceClass::RuledElliptic(SurfaceDescriptor::Atiyah1(e)),
            SurfaceClass::RuledHigherGenus(true),
            SurfaceClass::RuledHigherGenus(false),
            SurfaceClass::Abelian,
            SurfaceClass::BlownUpAbelian,
            SurfaceClass::K3,
            SurfaceClass::Enriques,
            SurfaceClass::BiellipticWithP1Quotient,
            SurfaceClass::QuotientProperlyElliptic(true),
            SurfaceClass::QuotientProperlyElliptic(false),
            SurfaceClass::ProperlyEllipticOther,
            SurfaceClass::GeneralType,
        ];
        for class in rows {
            let row = classify_theorem_d(&class).unwrap();
            if let Some(kernel) = row.kernel {
                assert_eq!(
                    row.dimension,
                    kernel.dimension() + row.quotient.dimension(),
                    "dimension bookkeeping for {class}"
                );
                if row.commutative {
                    assert!(kernel.is_commutative(), "commutative rows need commutative kernels");
                }
            }
            // The extension question only arises over a positive-dimensional
            // base image.
            if row.quotient == AutQuotient::Point {
                assert_eq!(row.splits, Splits::NotApplicable, "splits for {class}");
            }
        }
    }

    #[test]
    fn maximality_agrees_with_the_descriptor_predicate() {
        let e = curve11();
        let s = pt(&e, 4, 4);
        let descriptors = vec![
            SurfaceDescriptor::TrivialBundle(e),
            dec(e, 0, s),
            dec(e, 1, s),
            dec(e, 3, s),
            SurfaceDescriptor::Atiyah0(e),
            SurfaceDescriptor::Atiyah1(e),
            SurfaceDescriptor::Hirzebruch(0),
            SurfaceDescriptor::Hirzebruch(1),
            SurfaceDescriptor::Hirzebruch(4),
            SurfaceDescriptor::GenusAtLeastTwoTrivial(5),
        ];
        for d in descriptors {
            let row = aut_of_bundle(&d).unwrap();
            assert_eq!(row.maximal, d.has_maximal_aut(), "verdict for {d}");
        }
    }

    #[test]
    fn delta_kernel_is_a_klein_group() {
        let e = curve11();
        assert_eq!(e.two_torsion().points.len(), 4);
        let report = delta_kernel_check(&e).unwrap();
        assert!(report.verified());
        assert!(report.commutes_projectively);
        assert!(report.squares_are_scalar);
        for i in 0..4 {
            assert_eq!(report.table[0][i], i, "identity row");
            assert_eq!(report.table[i][i], 0, "order two");
        }
    }

    #[test]
    fn certificates_exist_exactly_for_maximal_classes() {
        let e5 = EllipticCurve::new(5, -1, 0).unwrap();
        let s = CurvePoint::Affine(Fp::new(2, 5), Fp::new(1, 5));
        let cert = maximality_certificate(&dec(e5, 0, s)).unwrap();
        assert!(cert.contains("down at the contraction point"));
        let t = maximality_certificate(&SurfaceDescriptor::TrivialBundle(e5)).unwrap();
        assert!(t.contains("dimension 4"));
        let a1 = maximality_certificate(&SurfaceDescriptor::Atiyah1(e5)).unwrap();
        assert!(a1.contains("Klein"));
        assert!(matches!(
            maximality_certificate(&dec(e5, 2, s)),
            Err(AutError::NotMaximalClass(_))
        ));
        assert!(matches!(
            maximality_certificate(&SurfaceDescriptor::Hirzebruch(1)),
            Err(AutError::NotMaximalClass(_))
        ));
    }
}
