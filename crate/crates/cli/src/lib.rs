//! Batch front end for the ruled-surface calculator: parses curves,
//! points, descriptors, and models from their textual grammars, runs the
//! engine, and prints either human-readable tables or JSON records.
//!
//! Exit codes: 0 for a determinate answer, 1 when the engine returns an
//! undetermined or partial result (the output quotes the rule gap), 2 for
//! input errors.

use std::fmt::Write as _;
use std::fs;

use clap::{Parser, Subcommand};
use serde_json::json;

use ruled_core::{
    aut_of_bundle, build_atiyah, chain_theorem_a, classify_theorem_d,
    descriptor_of_model_with_budget, maximality_certificate, parse_curve, parse_curvefn,
    parse_elm_point, parse_point, BundleModel, BundleSection, ChainCenters, ElmResult,
    EllipticCurve, RationalMinimalKind, SurfaceClass, SurfaceDescriptor, TransformError,
    DEFAULT_SEARCH_BUDGET,
};

pub mod verify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_UNDETERMINED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "ruled",
    version,
    about = "Exact calculator for ruled surfaces over elliptic curves"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Emit machine-readable JSON instead of tables
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for every randomized choice; runs with equal arguments and seed
    /// produce byte-identical output
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Step count for chains and scenario depth for cross-checks
    #[arg(long, global = true)]
    pub steps: Option<u32>,
    /// Candidate budget for certified section searches
    #[arg(long, global = true)]
    pub budget: Option<u64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Segre invariant and minimal-section census of a class
    Segre {
        /// Base curve, e.g. "E/F11: y^2 = x^3 - x"
        curve: String,
        /// Class tag: T | D(<d>; s=(x,y)) | A0 | A1 | F<n> | G<g>
        descriptor: String,
    },
    /// Self-intersection of the section [u : v] on a model
    Selfint {
        curve: String,
        /// First section component, a rational expression in x and y
        u: String,
        /// Second section component
        v: String,
        /// Path to a JSON model to use instead of the trivial bundle
        #[arg(long)]
        model: Option<String>,
    },
    /// Elementary transformation of a class at a marked fiber point
    Elm {
        curve: String,
        descriptor: String,
        /// Center, e.g. "z=(0,0); loc=min" with loc one of
        /// min|comp|q|generic|coords [u:v]
        center: String,
    },
    /// Descent chain certificate from a split class of positive degree
    Chain {
        curve: String,
        descriptor: String,
    },
    /// Surface isomorphism of two classes
    Iso {
        curve: String,
        first: String,
        second: String,
    },
    /// Conjugacy of the connected automorphism groups of two classes
    Conj {
        curve: String,
        first: String,
        second: String,
    },
    /// Connected automorphism group of a ruled surface, with a maximality
    /// certificate for the maximal classes
    Aut {
        curve: String,
        descriptor: String,
    },
    /// Automorphism verdict for any surface class; see `classify --help`
    /// for the accepted tags
    Classify {
        /// One of: p2, f<n>, rational-nonminimal, ruled-elliptic,
        /// ruled-genus2-trivial, ruled-genus2-nontrivial, abelian,
        /// abelian-blownup, k3, enriques, bielliptic-p1,
        /// quotient-elliptic-preserved, quotient-elliptic-destroyed,
        /// properly-elliptic-other, general-type, table
        target: String,
        /// Base curve, required for ruled-elliptic and table
        curve: Option<String>,
        /// Class tag, required for ruled-elliptic
        descriptor: Option<String>,
    },
    /// Construct an indecomposable bundle model by elementary
    /// transformations from the trivial bundle
    BuildAtiyah {
        curve: String,
        /// Segre invariant of the result: 0 or 1
        variant: u8,
        /// Special point the transformations are stacked over, e.g. "(0,0)"
        z: String,
    },
    /// Run verification suites; `verify all` runs every suite
    Verify {
        /// Suite name or "all"
        suite: String,
    },
}

/// Failure that still produces output: the exit code plus the message.
pub struct CmdError {
    pub code: i32,
    pub message: String,
}

impl CmdError {
    fn input(msg: impl Into<String>) -> CmdError {
        CmdError { code: EXIT_INPUT, message: msg.into() }
    }
}

macro_rules! from_input_err {
    ($($ty:ty),*) => {$(
        impl From<$ty> for CmdError {
            fn from(e: $ty) -> CmdError {
                CmdError::input(e.to_string())
            }
        }
    )*};
}
from_input_err!(
    ruled_core::ParseError,
    ruled_core::CurveError,
    ruled_core::BundleError,
    ruled_core::DescriptorError,
    ruled_core::AutError,
    std::fmt::Error
);

impl From<TransformError> for CmdError {
    fn from(e: TransformError) -> CmdError {
        CmdError::input(e.to_string())
    }
}

/// Executes a parsed invocation, writing all stdout content into `out`.
/// Returns the process exit code. Timings and other non-reproducible
/// diagnostics go to stderr only, keeping `out` byte-deterministic.
pub fn run(cli: &Cli, out: &mut String) -> i32 {
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(e) => {
            out.push_str("error: ");
            out.push_str(&e.message);
            out.push('\n');
            e.code
        }
    }
}

fn dispatch(cli: &Cli, out: &mut String) -> Result<i32, CmdError> {
    match &cli.command {
        Command::Segre { curve, descriptor } => {
            let (_, desc) = parse_pair(curve, descriptor)?;
            let segre = desc.segre();
            let census = desc.minimal_section_count();
            if cli.json {
                writeln!(
                    out,
                    "{}",
                    json!({
                        "descriptor": desc.to_string(),
                        "segre": segre,
                        "minimal_sections": census.to_string(),
                    })
                )?;
            } else {
                writeln!(out, "class {desc}")?;
                writeln!(out, "segre invariant: {segre}")?;
                writeln!(out, "minimal sections: {census}")?;
            }
            Ok(EXIT_OK)
        }
        Command::Selfint { curve, u, v, model } => {
            let e = parse_curve(curve)?;
            let m = match model {
                Some(path) => {
                    let text = fs::read_to_string(path)
                        .map_err(|err| CmdError::input(format!("cannot read {path}: {err}")))?;
                    BundleModel::from_json(&text)?
                }
                None => BundleModel::trivial(e),
            };
            if m.curve() != e {
                return Err(CmdError::input(
                    "the model in the file lives over a different curve",
                ));
            }
            let su = parse_curvefn(u, &e)?;
            let sv = parse_curvefn(v, &e)?;
            let section = BundleSection::new(su, sv)?;
            let sq = m.self_intersection(&section)?;
            let l = m.line_subbundle_class(&section)?;
            if cli.json {
                writeln!(
                    out,
                    "{}",
                    json!({
                        "self_intersection": sq,
                        "det_degree": m.det_degree(),
                        "subbundle_class": { "degree": l.degree, "sum": l.sum.to_string() },
                    })
                )?;
            } else {
                writeln!(out, "self-intersection: {sq}")?;
                writeln!(out, "det degree: {}", m.det_degree())?;
                writeln!(out, "line subbundle class: {l}")?;
            }
            Ok(EXIT_OK)
        }
        Command::Elm { curve, descriptor, center } => {
            let (e, desc) = parse_pair(curve, descriptor)?;
            let point = parse_elm_point(center, &e)?;
            let result = ruled_core::elm_descriptor(&desc, &point)?;
            let code = match &result {
                ElmResult::Known(_) => EXIT_OK,
                _ => EXIT_UNDETERMINED,
            };
            if cli.json {
                writeln!(
                    out,
                    "{}",
                    json!({
                        "before": desc.to_string(),
                        "center": point.to_string(),
                        "result": result,
                    })
                )?;
            } else {
                writeln!(out, "before: {desc}")?;
                writeln!(out, "center: {point}")?;
                writeln!(out, "result: {result}")?;
            }
            Ok(code)
        }
        Command::Chain { curve, descriptor } => {
            let (_, desc) = parse_pair(curve, descriptor)?;
            let steps = cli.steps.unwrap_or(10);
            let cert = chain_theorem_a(&desc, steps, &ChainCenters::Seeded(cli.seed))?;
            if cli.json {
                writeln!(out, "{}", serde_json::to_string(&cert).expect("serializable"))?;
            } else {
                writeln!(out, "{cert}")?;
            }
            Ok(EXIT_OK)
        }
        Command::Iso { curve, first, second } => {
            let e = parse_curve(curve)?;
            let d1 = SurfaceDescriptor::parse(first, Some(&e))?;
            let d2 = SurfaceDescriptor::parse(second, Some(&e))?;
            let iso = d1.is_isomorphic(&d2)?;
            if cli.json {
                writeln!(
                    out,
                    "{}",
                    json!({
                        "first": d1.to_string(),
                        "second": d2.to_string(),
                        "isomorphic": iso,
                    })
                )?;
            } else {
                writeln!(out, "{d1} and {d2}: {}", if iso { "isomorphic" } else { "not isomorphic" })?;
            }
            Ok(EXIT_OK)
        }
        Command::Conj { curve, first, second } => {
            let e = parse_curve(curve)?;
            let d1 = SurfaceDescriptor::parse(first, Some(&e))?;
            let d2 = SurfaceDescriptor::parse(second, Some(&e))?;
            let verdict = d1.is_conjugate_aut(&d2)?;
            if cli.json {
                writeln!(out, "{}", serde_json::to_string(&verdict).expect("serializable"))?;
            } else {
                writeln!(
                    out,
                    "groups {}",
                    if verdict.conjugate { "conjugate" } else { "not conjugate" }
                )?;
                if let Some(w) = &verdict.non_maximal_warning {
                    writeln!(out, "warning: {w}")?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Aut { curve, descriptor } => {
            let (_, desc) = parse_pair(curve, descriptor)?;
            let row = aut_of_bundle(&desc)?;
            if cli.json {
                writeln!(out, "{}", serde_json::to_string(&row).expect("serializable"))?;
            } else if row.maximal {
                // The certificate restates the classification row before
                // arguing maximality, so it replaces the plain row.
                writeln!(out, "{}", maximality_certificate(&desc)?)?;
            } else {
                writeln!(out, "class {desc}")?;
                writeln!(out, "{row}")?;
            }
            Ok(EXIT_OK)
        }
        Command::Classify { target, curve, descriptor } => {
            run_classify(cli, target, curve.as_deref(), descriptor.as_deref(), out)
        }
        Command::BuildAtiyah { curve, variant, z } => {
            let e = parse_curve(curve)?;
            let z1 = parse_point(z, &e)?;
            let model = build_atiyah(e, *variant, z1, cli.seed)?;
            let budget = cli.budget.unwrap_or(DEFAULT_SEARCH_BUDGET);
            let desc = descriptor_of_model_with_budget(&model, budget)?;
            if cli.json {
                let model_json: serde_json::Value =
                    serde_json::from_str(&model.to_json()).expect("model serializes to JSON");
                writeln!(
                    out,
                    "{}",
                    json!({
                        "descriptor": desc.to_string(),
                        "det_degree": model.det_degree(),
                        "model": model_json,
                    })
                )?;
            } else {
                writeln!(out, "built class {desc}")?;
                writeln!(out, "det degree: {}", model.det_degree())?;
                writeln!(out, "special points: {}", model.special_points().len())?;
                writeln!(out, "(use --json to print the model itself)")?;
            }
            Ok(EXIT_OK)
        }
        Command::Verify { suite } => run_verify(cli, suite, out),
    }
}

fn parse_pair(curve: &str, descriptor: &str) -> Result<(EllipticCurve, SurfaceDescriptor), CmdError> {
    let e = parse_curve(curve)?;
    let desc = SurfaceDescriptor::parse(descriptor, Some(&e))?;
    Ok((e, desc))
}

fn parse_class_tag(
    target: &str,
    curve: Option<&str>,
    descriptor: Option<&str>,
) -> Result<SurfaceClass, CmdError> {
    let need_curve = || -> Result<EllipticCurve, CmdError> {
        let src = curve.ok_or_else(|| {
            CmdError::input("this class tag needs a base curve argument".to_string())
        })?;
        Ok(parse_curve(src)?)
    };
    Ok(match target {
        "p2" => SurfaceClass::RationalMinimal(RationalMinimalKind::ProjectivePlane),
        "rational-nonminimal" => SurfaceClass::RationalNonMinimal,
        "ruled-elliptic" => {
            let e = need_curve()?;
            let src = descriptor.ok_or_else(|| {
                CmdError::input("ruled-elliptic needs a descriptor argument".to_string())
            })?;
            SurfaceClass::RuledElliptic(SurfaceDescriptor::parse(src, Some(&e))?)
        }
        "ruled-genus2-trivial" => SurfaceClass::RuledHigherGenus(true),
        "ruled-genus2-nontrivial" => SurfaceClass::RuledHigherGenus(false),
        "abelian" => SurfaceClass::Abelian,
        "abelian-blownup" => SurfaceClass::BlownUpAbelian,
        "k3" => SurfaceClass::K3,
        "enriques" => SurfaceClass::Enriques,
        "bielliptic-p1" => SurfaceClass::BiellipticWithP1Quotient,
        "quotient-elliptic-preserved" => SurfaceClass::QuotientProperlyElliptic(true),
        "quotient-elliptic-destroyed" => SurfaceClass::QuotientProperlyElliptic(false),
        "properly-elliptic-other" => SurfaceClass::ProperlyEllipticOther,
        "general-type" => SurfaceClass::GeneralType,
        other => {
            if let Some(num) = other.strip_prefix('f') {
                let n: u32 = num.parse().map_err(|_| {
                    CmdError::input(format!("bad Hirzebruch tag: {other:?}"))
                })?;
                SurfaceClass::RationalMinimal(RationalMinimalKind::Hirzebruch(n))
            } else {
                return Err(CmdError::input(format!(
                    "unknown class tag {other:?}; see `classify --help`"
                )));
            }
        }
    })
}

/// Representative rows, one per class tag, instantiated over a curve.
fn classify_corpus(e: EllipticCurve) -> Vec<SurfaceClass> {
    let s = e
        .points()
        .into_iter()
        .find(|pt| !pt.is_infinity())
        .expect("elliptic curves here have affine points");
    let dec = |d: i64| {
        SurfaceDescriptor::decomposable(
            e,
            ruled_core::DivisorClass { degree: d, sum: s },
        )
    };
    vec![
        SurfaceClass::RationalMinimal(RationalMinimalKind::ProjectivePlane),
        SurfaceClass::RationalMinimal(RationalMinimalKind::Hirzebruch(0)),
        SurfaceClass::RationalMinimal(RationalMinimalKind::Hirzebruch(1)),
        SurfaceClass::RationalMinimal(RationalMinimalKind::Hirzebruch(2)),
        SurfaceClass::RationalNonMinimal,
        SurfaceClass::RuledElliptic(SurfaceDescriptor::TrivialBundle(e)),
        SurfaceClass::RuledElliptic(dec(0)),
        SurfaceClass::RuledElliptic(dec(2)),
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
    ]
}

fn run_classify(
    cli: &Cli,
    target: &str,
    curve: Option<&str>,
    descriptor: Option<&str>,
    out: &mut String,
) -> Result<i32, CmdError> {
    if target == "table" {
        let src = curve.ok_or_else(|| {
            CmdError::input("`classify table` needs a base curve argument".to_string())
        })?;
        let e = parse_curve(src)?;
        let rows = classify_corpus(e);
        if cli.json {
            let mut records = Vec::new();
            for class in rows {
                let row = classify_theorem_d(&class)?;
                records.push(json!({ "class": class.to_string(), "group": row }));
            }
            writeln!(out, "{}", serde_json::to_string(&records).expect("serializable"))?;
        } else {
            for class in rows {
                let row = classify_theorem_d(&class)?;
                writeln!(out, "{class}\n  {row}")?;
            }
        }
        return Ok(EXIT_OK);
    }
    let class = parse_class_tag(target, curve, descriptor)?;
    let row = classify_theorem_d(&class)?;
    if cli.json {
        writeln!(
            out,
            "{}",
            json!({ "class": class.to_string(), "group": row })
        )?;
    } else {
        writeln!(out, "{class}")?;
        writeln!(out, "{row}")?;
    }
    Ok(EXIT_OK)
}

fn run_verify(cli: &Cli, suite: &str, out: &mut String) -> Result<i32, CmdError> {
    let cfg = verify::VerifyConfig {
        seed: cli.seed,
        steps: cli.steps,
        budget: cli.budget.unwrap_or(DEFAULT_SEARCH_BUDGET),
    };
    let reports = match verify::run_suites(suite, &cfg) {
        Some(reports) => reports,
        None => {
            return Err(CmdError::input(format!(
                "unknown suite {suite:?}; available: {} or \"all\"",
                verify::SUITE_NAMES.join(", ")
            )))
        }
    };
    let mut failed = false;
    if cli.json {
        writeln!(out, "{}", serde_json::to_string(&reports).expect("serializable"))?;
        failed = reports.iter().any(|r| !r.failures.is_empty());
    } else {
        for r in &reports {
            if r.failures.is_empty() {
                writeln!(out, "suite {}: {} checks, ok", r.name, r.checks)?;
            } else {
                failed = true;
                writeln!(
                    out,
                    "suite {}: {} checks, {} FAILED",
                    r.name,
                    r.checks,
                    r.failures.len()
                )?;
                for f in &r.failures {
                    writeln!(out, "  - {f}")?;
                }
            }
            eprintln!("suite {}: {} ms", r.name, r.millis);
        }
    }
    Ok(if failed { EXIT_UNDETERMINED } else { EXIT_OK })
}

/// Parse helper shared with the acceptance tests.
pub fn standard_curve_11() -> EllipticCurve {
    parse_curve("E/F11: y^2 = x^3 - x").expect("the standard test curve parses")
}

pub fn standard_curve_5() -> EllipticCurve {
    parse_curve("E/F5: y^2 = x^3 - x").expect("the standard test curve parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    const CURVE: &str = "E/F11: y^2 = x^3 - x";

    fn invoke(args: &[&str]) -> (i32, String) {
        let mut full = vec!["ruled"];
        full.extend_from_slice(args);
        let cli = Cli::try_parse_from(full).expect("arguments parse");
        let mut out = String::new();
        let code = run(&cli, &mut out);
        (code, out)
    }

    #[test]
    fn segre_prints_class_invariant_and_census() {
        let (code, out) = invoke(&["segre", CURVE, "D(1; s=(0,0))"]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(out, "class D(1; s=(0,0))\nsegre invariant: -1\nminimal sections: one\n");
    }

    #[test]
    fn elm_at_a_rule_gap_exits_with_the_undetermined_code() {
        let (code, out) =
            invoke(&["elm", CURVE, "D(2; s=(4,4))", "z=(0,0); loc=generic"]);
        assert_eq!(code, EXIT_UNDETERMINED);
        assert!(out.contains("undetermined"), "output was: {out}");
    }

    #[test]
    fn malformed_curve_exits_with_the_input_code() {
        let (code, out) = invoke(&["segre", "E/F9: y^2 = x^3 - x", "T"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(out.starts_with("error:"), "output was: {out}");
    }

    #[test]
    fn json_output_is_machine_readable() {
        let (code, out) = invoke(&["--json", "segre", CURVE, "A0"]);
        assert_eq!(code, EXIT_OK);
        let v: serde_json::Value = serde_json::from_str(&out).expect("valid JSON");
        assert_eq!(v["segre"], 0);
        assert_eq!(v["minimal_sections"], "one");
    }

    #[test]
    fn equal_seeds_give_byte_identical_output() {
        let args = ["chain", CURVE, "D(1; s=(0,0))", "--steps", "4", "--seed", "9"];
        let (c1, o1) = invoke(&args);
        let (c2, o2) = invoke(&args);
        assert_eq!(c1, EXIT_OK);
        assert_eq!((c1, &o1), (c2, &o2));
    }

    #[test]
    fn chain_header_matches_the_certificate_format() {
        let (code, out) = invoke(&["chain", CURVE, "D(1; s=(0,0))", "--steps", "2"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("step, segre, L=(d,s), h0(L), h0(L-z), gamma_exists"));
    }

    #[test]
    fn iso_distinguishes_translation_twists_from_genuine_obstructions() {
        let (code, out) = invoke(&["iso", CURVE, "D(0; s=(4,4))", "D(0; s=(4,7))"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("isomorphic"), "output was: {out}");
        let (code, out) = invoke(&["iso", CURVE, "T", "A0"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("not isomorphic"), "output was: {out}");
    }

    #[test]
    fn conj_warns_outside_the_maximal_classes() {
        let (code, out) = invoke(&["conj", CURVE, "D(2; s=(4,4))", "D(2; s=(4,4))"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("conjugate"));
        assert!(out.contains("warning"), "output was: {out}");
    }

    #[test]
    fn build_atiyah_reports_the_expected_class() {
        let (code, out) = invoke(&["build-atiyah", "E/F5: y^2 = x^3 - x", "0", "(0,0)"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("built class A0"), "output was: {out}");
    }

    #[test]
    fn verify_rejects_unknown_suites() {
        let (code, out) = invoke(&["verify", "no-such-suite"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(out.contains("unknown suite"), "output was: {out}");
    }
}
