//! CSV formatting helpers shared by the writers.

use std::io::{self, Write};

/// Decimal notation with at most 6 significant digits and no trailing zeros.
pub fn fmt_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    let mut s = format!("{x:.decimals$}");
    // rounding can bump the magnitude (9.999996 -> 10.00000)
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".to_string();
    }
    s
}

/// Writes `# key=value` metadata lines.
pub fn write_metadata<W: Write>(out: &mut W, entries: &[(&str, String)]) -> io::Result<()> {
    for (key, value) in entries {
        writeln!(out, "# {key}={value}")?;
    }
    Ok(())
}
