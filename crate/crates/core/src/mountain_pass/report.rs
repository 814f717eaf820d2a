use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Converged,
    Saturated,
    Stalled,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::Saturated => "saturated",
            Status::Stalled => "stalled",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub eps: f64,
    pub lambda: f64,
    /// Critical level.
    pub energy: f64,
    pub grad_norm: f64,
    pub h1: f64,
    pub sup: f64,
    /// Ray scaling with negative energy.
    pub k_path: f64,
    /// Maximum of the energy along the initial ray.
    pub m2: f64,
    pub k_grad_emp: f64,
    pub l1_singular: f64,
    pub iterations: usize,
    pub status: Status,
}

/// Fixed 17-significant-digit rendering; non-finite values become `null`.
pub(crate) fn json_f64(out: &mut String, x: f64) {
    if x.is_finite() {
        let _ = write!(out, "{x:.16e}");
    } else {
        out.push_str("null");
    }
}

impl SolveReport {
    /// A report for a step that did not converge.
    pub fn failed(eps: f64, lambda: f64, status: Status, iterations: usize, grad_norm: f64) -> Self {
        Self {
            eps,
            lambda,
            energy: f64::NAN,
            grad_norm,
            h1: f64::NAN,
            sup: f64::NAN,
            k_path: f64::NAN,
            m2: f64::NAN,
            k_grad_emp: f64::NAN,
            l1_singular: f64::NAN,
            iterations,
            status,
        }
    }

    /// One JSON object on a single line, keys in a fixed order.
    pub fn to_json_line(&self) -> String {
        let mut s = String::from("{");
        let fields = [
            ("eps", self.eps),
            ("lambda", self.lambda),
            ("energy", self.energy),
            ("grad_norm", self.grad_norm),
            ("h1", self.h1),
            ("sup", self.sup),
            ("K_path", self.k_path),
            ("m2", self.m2),
            ("K_grad_emp", self.k_grad_emp),
            ("l1_singular", self.l1_singular),
        ];
        for (k, v) in fields {
            let _ = write!(s, "\"{k}\":");
            json_f64(&mut s, v);
            s.push(',');
        }
        let _ = write!(s, "\"iterations\":{},\"status\":\"{}\"}}", self.iterations, self.status.as_str());
        s
    }
}
