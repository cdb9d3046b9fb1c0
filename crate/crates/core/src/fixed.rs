use serde::Serializer;

/// Floats in reports are rounded to 12 decimal places so repeated runs
/// print identical text.
pub(crate) fn round12<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(round(*x))
}

pub(crate) fn round12_vec2<S: Serializer>(v: &[Vec<f64>], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for row in v {
        let rounded: Vec<f64> = row.iter().map(|&x| round(x)).collect();
        seq.serialize_element(&rounded)?;
    }
    seq.end()
}

pub fn round(x: f64) -> f64 {
    if x.is_finite() {
        (x * 1e12).round() / 1e12
    } else {
        x
    }
}
