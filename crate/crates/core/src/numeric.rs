//! Small numerical helpers shared across modules.

/// `log Σ exp(x)` with the max-shift trick. Empty input gives `-inf`.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Shifts a log table so that `Σ exp = 1`.
pub fn normalize_log(xs: &mut [f64]) {
    let z = log_sum_exp(xs);
    xs.iter_mut().for_each(|x| *x -= z);
}

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Formats `x` with `digits` significant digits, like C's `%g`.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let digits = digits.max(1);
    let exponent = x.abs().log10().floor() as i32;
    // rounding may bump the exponent (e.g. 9.999999 -> 10.0000)
    let sci = format!("{:.*e}", digits - 1, x);
    let exp_after: i32 = sci.split('e').nth(1).and_then(|e| e.parse().ok()).unwrap_or(exponent);
    if exp_after < -4 || exp_after >= digits as i32 {
        let mantissa = trim_zeros(sci.split('e').next().unwrap_or(&sci));
        let sign = if exp_after < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp_after.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp_after).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
