//! Coordinate charts: variable names, dimension and the degree guardrail.

use crate::error::SymError;
use crate::expr::Expr;
use crate::monomial::MAX_VARS;

/// Default bound on the total degree of any expression a chart will build.
pub const DEFAULT_DEGREE_BOUND: u32 = 64;

/// An ordered set of base coordinates, optionally followed by two fiber
/// coordinates `p1, p2` when the dimension is 3.
///
/// Base variable `i` is lane `i`; fiber variable `a` (1 or 2) is lane `n + a - 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Chart {
    base: Vec<String>,
    fiber: Vec<String>,
    degree_bound: u32,
}

fn valid_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Chart {
    /// Chart with base variables `x0, ..., x{n-1}`.
    pub fn new(n: usize) -> Result<Chart, SymError> {
        Chart::with_names((0..n).map(|i| format!("x{i}")).collect())
    }

    pub fn with_names(base: Vec<String>) -> Result<Chart, SymError> {
        let n = base.len();
        if !(2..=6).contains(&n) {
            return Err(SymError::InvalidChart(format!("dimension {n} outside 2..=6")));
        }
        let chart = Chart { base, fiber: Vec::new(), degree_bound: DEFAULT_DEGREE_BOUND };
        chart.validate()?;
        Ok(chart)
    }

    /// Adds the fiber variables; only allowed in dimension 3.
    pub fn with_fiber(mut self, names: [&str; 2]) -> Result<Chart, SymError> {
        if self.dim() != 3 {
            return Err(SymError::InvalidChart("fiber variables require dimension 3".into()));
        }
        self.fiber = names.iter().map(|s| s.to_string()).collect();
        self.validate()?;
        Ok(self)
    }

    /// The same chart with fiber variables, using `p1, p2` if none are declared.
    pub fn fibered(&self) -> Result<Chart, SymError> {
        if self.has_fiber() {
            Ok(self.clone())
        } else {
            self.clone().with_fiber(["p1", "p2"])
        }
    }

    /// The chart without fiber variables.
    pub fn base_chart(&self) -> Chart {
        Chart { base: self.base.clone(), fiber: Vec::new(), degree_bound: self.degree_bound }
    }

    pub fn with_degree_bound(mut self, bound: u32) -> Chart {
        self.degree_bound = bound;
        self
    }

    fn validate(&self) -> Result<(), SymError> {
        let all: Vec<&String> = self.base.iter().chain(&self.fiber).collect();
        if all.len() > MAX_VARS {
            return Err(SymError::InvalidChart("too many variables".into()));
        }
        for (i, name) in all.iter().enumerate() {
            if !valid_identifier(name) {
                return Err(SymError::InvalidChart(format!("`{name}` is not an identifier")));
            }
            if all[..i].contains(name) {
                return Err(SymError::InvalidChart(format!("duplicate variable `{name}`")));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.base.len()
    }

    pub fn has_fiber(&self) -> bool {
        !self.fiber.is_empty()
    }

    pub fn num_vars(&self) -> usize {
        self.base.len() + self.fiber.len()
    }

    pub fn base_names(&self) -> &[String] {
        &self.base
    }

    pub fn fiber_names(&self) -> &[String] {
        &self.fiber
    }

    pub fn names(&self) -> Vec<String> {
        self.base.iter().chain(&self.fiber).cloned().collect()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.base.iter().chain(&self.fiber).position(|n| n == name)
    }

    /// Lane of fiber variable `p^a`, `a` in `{1, 2}`.
    pub fn fiber_var(&self, a: usize) -> usize {
        assert!(self.has_fiber() && (1..=2).contains(&a));
        self.dim() + a - 1
    }

    /// Bit mask of the fiber lanes.
    pub fn fiber_mask(&self) -> u32 {
        if self.has_fiber() {
            0b11 << self.dim()
        } else {
            0
        }
    }

    pub fn degree_bound(&self) -> u32 {
        self.degree_bound
    }

    /// Errors if the expression exceeds the degree guardrail.
    pub fn check_degree(&self, e: &Expr) -> Result<(), SymError> {
        let degree = e.total_degree();
        if degree > self.degree_bound {
            Err(SymError::DegreeBound { degree, bound: self.degree_bound })
        } else {
            Ok(())
        }
    }

    pub fn parse(&self, text: &str) -> Result<Expr, SymError> {
        crate::parse::parse(text, self)
    }

    pub fn render(&self, e: &Expr) -> String {
        let mut names = self.names();
        names.resize_with(MAX_VARS, || "?".to_string());
        crate::print::render(e, &names)
    }

    /// Partial derivative by variable name.
    pub fn diff(&self, e: &Expr, name: &str) -> Result<Expr, SymError> {
        let v =
            self.var_index(name).ok_or_else(|| SymError::UnknownVariable { name: name.to_string(), position: 0 })?;
        Ok(e.diff(v))
    }

    /// Whether the expression only uses variables of this chart.
    pub fn owns(&self, e: &Expr) -> bool {
        e.var_mask() >> self.num_vars() == 0
    }
}
