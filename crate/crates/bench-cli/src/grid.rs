//! Sweep grid syntax: `a,b,c` or the geometric range `start:stop:factor`.

/// Parses a grid specification into its values, in order.
///
/// A range walks from `start` towards `stop` (in either direction),
/// multiplying or dividing by `factor` and including `stop` when it lands
/// on it up to rounding.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, String> {
    let text = text.trim();
    if text.is_empty() {
        return Err("empty grid".into());
    }
    let num = |s: &str| -> Result<f64, String> {
        let v: f64 = s.trim().parse().map_err(|_| format!("bad grid value `{}`", s.trim()))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(format!("non-finite grid value `{}`", s.trim()))
        }
    };
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        let [start, stop, factor] = parts.as_slice() else {
            return Err("range must be `start:stop:factor`".into());
        };
        let (start, stop, factor) = (num(start)?, num(stop)?, num(factor)?);
        if start <= 0.0 || stop <= 0.0 {
            return Err("range bounds must be positive".into());
        }
        if factor <= 1.0 {
            return Err("range factor must be > 1".into());
        }
        let steps = ((stop / start).ln().abs() / factor.ln() + 1e-9).floor() as i32;
        let sign = if stop >= start { 1 } else { -1 };
        Ok((0..=steps).map(|i| start * factor.powi(sign * i)).collect())
    } else {
        text.split(',').map(num).collect()
    }
}
