//! Deterministic number formatting: shortest round-trip representation of
//! the value rounded to 9 significant digits, with exponent notation
//! outside a readable magnitude window. No locale, no timestamps.

pub fn sig9(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if v.is_nan() {
        return "nan".to_string();
    }
    if v.is_infinite() {
        return if v > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        };
    }
    let rounded: f64 = format!("{v:.8e}").parse().expect("rounded float reparses");
    let magnitude = rounded.abs();
    if !(1e-4..1e15).contains(&magnitude) {
        format!("{rounded:e}")
    } else {
        format!("{rounded}")
    }
}
