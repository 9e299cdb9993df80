//! TOML operator spec files.
//!
//! ```toml
//! [operator]
//! kind = "dense"
//! rows = [[0.0, 1.0], [0.0, 0.0]]   # entries are numbers or [re, im]
//!
//! [options]          # optional; command-line flags take precedence
//! tol = 1e-6
//! grid = 8
//! depth = 8
//! branch = [0, 1]
//! seed = 7
//! cluster_radius = 0.05
//!
//! [contour]          # optional
//! nodes = 256
//! clearance = 1e-6
//! ```
//!
//! Operator kinds: `dense`, `random_unitary` (`dim`, `seed`), `diagonal`
//! (`eigenvalues`, `kernel`, `cokernel`), `right_shift` / `left_shift`
//! (`fiber`, `fiber_truncation`, `blocks`), `multiplication` (`points`,
//! `weights`), `volterra` (`grid`), `zero` (`space`, `truncation`),
//! `compact` (`rows`, `kernel`, `dense_range`) and `direct_sum` (`parts`, an
//! array of operator tables). Cardinals are integers or `"infinite"`.
//! Unknown keys are rejected.

use std::fmt;
use std::path::Path;

use serde::Deserialize;

use crate::opcore::{CardinalDim, MatrixOperator, StructuredOperator, C64};
use crate::samples;

/// Largest `dim` accepted for generated operators.
pub const MAX_GENERATED_DIM: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecError {
    pub message: String,
    /// 1-based position of the offending text, when known.
    pub line: Option<usize>,
    pub column: Option<usize>,
    /// Offending key or path such as `operator.parts[1]`.
    pub field: Option<String>,
}

impl SpecError {
    fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        SpecError {
            message: message.into(),
            line: None,
            column: None,
            field: Some(field.into()),
        }
    }
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "line {l}, column {c}: ")?,
            (Some(l), None) => write!(f, "line {l}: ")?,
            _ => {}
        }
        if let Some(field) = &self.field {
            write!(f, "field `{field}`: ")?;
        }
        f.write_str(&self.message)
    }
}

impl std::error::Error for SpecError {}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Real(f64),
    Complex([f64; 2]),
}

impl Scalar {
    pub fn value(self) -> C64 {
        match self {
            Scalar::Real(re) => C64::new(re, 0.0),
            Scalar::Complex([re, im]) => C64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorSpec {
    Dense {
        rows: Vec<Vec<Scalar>>,
    },
    RandomUnitary {
        dim: usize,
        seed: u64,
    },
    Diagonal {
        eigenvalues: Vec<Scalar>,
        #[serde(default)]
        kernel: Option<CardinalDim>,
        #[serde(default)]
        cokernel: Option<CardinalDim>,
    },
    RightShift {
        fiber: CardinalDim,
        fiber_truncation: usize,
        blocks: usize,
    },
    LeftShift {
        fiber: CardinalDim,
        fiber_truncation: usize,
        blocks: usize,
    },
    Multiplication {
        points: Vec<Scalar>,
        #[serde(default)]
        weights: Option<Vec<f64>>,
    },
    Volterra {
        grid: usize,
    },
    Zero {
        space: CardinalDim,
        truncation: usize,
    },
    Compact {
        rows: Vec<Vec<Scalar>>,
        kernel: CardinalDim,
        dense_range: bool,
    },
    DirectSum {
        parts: Vec<OperatorSpec>,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsSpec {
    pub tol: Option<f64>,
    pub grid: Option<usize>,
    pub depth: Option<usize>,
    pub branch: Option<Vec<i64>>,
    pub seed: Option<u64>,
    pub cluster_radius: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContourSpec {
    pub nodes: Option<usize>,
    pub clearance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub operator: OperatorSpec,
    #[serde(default)]
    pub options: OptionsSpec,
    #[serde(default)]
    pub contour: ContourSpec,
}

impl SpecFile {
    pub fn parse(text: &str) -> Result<SpecFile, SpecError> {
        toml::from_str(text).map_err(|e| locate(text, &e))
    }

    pub fn load(path: &Path) -> Result<SpecFile, SpecError> {
        let text = std::fs::read_to_string(path).map_err(|e| SpecError {
            message: format!("cannot read {}: {e}", path.display()),
            line: None,
            column: None,
            field: None,
        })?;
        Self::parse(&text)
    }

    pub fn to_operator(&self) -> Result<StructuredOperator, SpecError> {
        self.check_options()?;
        build(&self.operator, "operator")
    }

    fn check_options(&self) -> Result<(), SpecError> {
        let o = &self.options;
        if let Some(t) = o.tol {
            if !(t.is_finite() && t > 0.0) {
                return Err(SpecError::invalid("options.tol", "must be positive"));
            }
        }
        if o.grid == Some(0) {
            return Err(SpecError::invalid("options.grid", "must be positive"));
        }
        if o.depth == Some(0) {
            return Err(SpecError::invalid("options.depth", "must be positive"));
        }
        if let Some(r) = o.cluster_radius {
            if !(r.is_finite() && r > 0.0) {
                return Err(SpecError::invalid("options.cluster_radius", "must be positive"));
            }
        }
        if self.contour.nodes == Some(0) {
            return Err(SpecError::invalid("contour.nodes", "must be positive"));
        }
        if let Some(c) = self.contour.clearance {
            if !(c.is_finite() && c >= 0.0) {
                return Err(SpecError::invalid("contour.clearance", "must be non-negative"));
            }
        }
        Ok(())
    }
}

fn matrix(rows: &[Vec<Scalar>], path: &str) -> Result<MatrixOperator, SpecError> {
    let n = rows.len();
    if n == 0 {
        return Err(SpecError::invalid(path, "matrix needs at least one row"));
    }
    if let Some(i) = rows.iter().position(|r| r.len() != n) {
        return Err(SpecError::invalid(
            format!("{path}[{i}]"),
            format!("row has {} entries, expected {n}", rows[i].len()),
        ));
    }
    let entries: Vec<C64> = rows.iter().flatten().map(|s| s.value()).collect();
    MatrixOperator::from_row_major(n, &entries).map_err(|e| SpecError::invalid(path, e.to_string()))
}

fn build(spec: &OperatorSpec, path: &str) -> Result<StructuredOperator, SpecError> {
    let wrap = |r: crate::Result<StructuredOperator>| r.map_err(|e| SpecError::invalid(path, e.to_string()));
    match spec {
        OperatorSpec::Dense { rows } => Ok(StructuredOperator::Dense(matrix(rows, &format!("{path}.rows"))?)),
        OperatorSpec::RandomUnitary { dim, seed } => {
            if *dim == 0 || *dim > MAX_GENERATED_DIM {
                return Err(SpecError::invalid(
                    format!("{path}.dim"),
                    format!("must lie in 1..={MAX_GENERATED_DIM}"),
                ));
            }
            Ok(StructuredOperator::Dense(samples::random_unitary(*seed, *dim)))
        }
        OperatorSpec::Diagonal {
            eigenvalues,
            kernel,
            cokernel,
        } => {
            let eigs: Vec<C64> = eigenvalues.iter().map(|s| s.value()).collect();
            let zeros = CardinalDim::from(eigs.iter().filter(|z| z.norm() == 0.0).count());
            let kernel = kernel.unwrap_or(zeros);
            let cokernel = cokernel.unwrap_or(kernel);
            wrap(StructuredOperator::diagonal(eigs, kernel, cokernel))
        }
        OperatorSpec::RightShift {
            fiber,
            fiber_truncation,
            blocks,
        } => wrap(StructuredOperator::right_shift(*fiber, *fiber_truncation, *blocks)),
        OperatorSpec::LeftShift {
            fiber,
            fiber_truncation,
            blocks,
        } => wrap(StructuredOperator::left_shift(*fiber, *fiber_truncation, *blocks)),
        OperatorSpec::Multiplication { points, weights } => {
            let points: Vec<C64> = points.iter().map(|s| s.value()).collect();
            let weights = weights.clone().unwrap_or_else(|| vec![1.0; points.len()]);
            wrap(StructuredOperator::multiplication(points, weights))
        }
        OperatorSpec::Volterra { grid } => wrap(StructuredOperator::volterra(*grid)),
        OperatorSpec::Zero { space, truncation } => wrap(StructuredOperator::zero(*space, *truncation)),
        OperatorSpec::Compact {
            rows,
            kernel,
            dense_range,
        } => {
            let m = matrix(rows, &format!("{path}.rows"))?;
            wrap(StructuredOperator::compact(m, *kernel, *dense_range))
        }
        OperatorSpec::DirectSum { parts } => {
            let parts = parts
                .iter()
                .enumerate()
                .map(|(i, p)| build(p, &format!("{path}.parts[{i}]")))
                .collect::<Result<Vec<_>, _>>()?;
            wrap(StructuredOperator::direct_sum(parts))
        }
    }
}

/// Turns a TOML error into a positioned diagnostic. Unknown-key errors are
/// reported by the deserializer at the enclosing table, so the key itself
/// is looked up after that point.
fn locate(text: &str, e: &toml::de::Error) -> SpecError {
    let message = e.message().trim().to_string();
    let field = message
        .strip_prefix("unknown field `")
        .and_then(|rest| rest.split('`').next())
        .map(str::to_string);
    let start = e.span().map(|s| s.start).unwrap_or(0).min(text.len());
    let mut offset = start;
    if let Some(key) = &field {
        let mut pos = start;
        for line in text[start..].split_inclusive('\n') {
            let trimmed = line.trim_start();
            if let Some(rest) = trimmed.strip_prefix(key.as_str()) {
                if rest.trim_start().starts_with('=') {
                    offset = pos + (line.len() - trimmed.len());
                    break;
                }
            }
            pos += line.len();
        }
    }
    let (line, column) = line_column(text, offset);
    SpecError {
        message,
        line: e.span().map(|_| line),
        column: e.span().map(|_| column),
        field,
    }
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_dense_with_complex_entries() {
        let f = SpecFile::parse("[operator]\nkind = \"dense\"\nrows = [[1, [0.0, 2.0]], [0.5, 1]]\n").unwrap();
        let op = f.to_operator().unwrap();
        let m = op.materialize().unwrap();
        assert_eq!(m.matrix()[(0, 1)], C64::new(0.0, 2.0));
        assert_eq!(m.matrix()[(1, 0)], C64::new(0.5, 0.0));
    }

    #[test]
    fn unknown_key_reports_its_line() {
        let text = "[operator]\nkind = \"volterra\"\ngrid = 32\ngird = 3\n";
        let e = SpecFile::parse(text).unwrap_err();
        assert_eq!(e.field.as_deref(), Some("gird"));
        assert_eq!(e.line, Some(4));
        assert!(e.to_string().starts_with("line 4, column 1: field `gird`"));
    }

    #[test]
    fn unknown_top_level_table_and_option() {
        assert!(SpecFile::parse("[operator]\nkind = \"volterra\"\ngrid = 32\n[extra]\n").is_err());
        let e = SpecFile::parse("[operator]\nkind = \"volterra\"\ngrid = 32\n[options]\nseeds = 1\n")
            .unwrap_err();
        assert_eq!(e.field.as_deref(), Some("seeds"));
        assert_eq!(e.line, Some(5));
    }

    #[test]
    fn unknown_kind() {
        let e = SpecFile::parse("[operator]\nkind = \"jordan\"\n").unwrap_err();
        assert_eq!(e.line, Some(2));
        assert!(e.message.contains("unknown variant"));
    }

    #[test]
    fn nested_direct_sum() {
        let text = r#"
[operator]
kind = "direct_sum"

[[operator.parts]]
kind = "random_unitary"
dim = 4
seed = 1

[[operator.parts]]
kind = "right_shift"
fiber = "infinite"
fiber_truncation = 2
blocks = 8
"#;
        let op = SpecFile::parse(text).unwrap().to_operator().unwrap();
        assert_eq!(op.dim(), Some(20));
        assert_eq!(op.to_string(), "DirectSum[Dense(4x4), BlockRightShift(Infinite, 2, 8)]");
    }

    #[test]
    fn invalid_operator_names_the_path() {
        let text = r#"
[operator]
kind = "direct_sum"
[[operator.parts]]
kind = "volterra"
grid = 16
[[operator.parts]]
kind = "zero"
space = 3
truncation = 2
"#;
        let e = SpecFile::parse(text).unwrap().to_operator().unwrap_err();
        assert_eq!(e.field.as_deref(), Some("operator.parts[1]"));
    }

    #[test]
    fn ragged_rows_rejected() {
        let e = SpecFile::parse("[operator]\nkind = \"dense\"\nrows = [[1, 2], [3]]\n")
            .unwrap()
            .to_operator()
            .unwrap_err();
        assert_eq!(e.field.as_deref(), Some("operator.rows[1]"));
    }

    #[test]
    fn options_and_contour() {
        let text = "[operator]\nkind = \"zero\"\nspace = \"infinite\"\ntruncation = 8\n\
                    [options]\ntol = 1e-8\nbranch = [0, -1]\n[contour]\nnodes = 128\n";
        let f = SpecFile::parse(text).unwrap();
        assert_eq!(f.options.branch, Some(vec![0, -1]));
        assert_eq!(f.contour.nodes, Some(128));
        assert!(f.to_operator().is_ok());
        let bad = text.replace("nodes = 128", "nodes = 0");
        assert!(SpecFile::parse(&bad).unwrap().to_operator().is_err());
    }

    #[test]
    fn diagonal_cardinals_default_from_zero_count() {
        let f = SpecFile::parse("[operator]\nkind = \"diagonal\"\neigenvalues = [0, 1]\n").unwrap();
        let op = f.to_operator().unwrap();
        assert_eq!(
            crate::opcore::kernel_defect(&op),
            (CardinalDim::Finite(1), CardinalDim::Finite(1))
        );
    }
}
