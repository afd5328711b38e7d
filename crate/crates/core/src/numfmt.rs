//! Locale-independent complex literals of the form `a+bi` / `a-bi`.

use num_complex::Complex64;

pub fn format_complex(z: Complex64) -> String {
    let im = if z.im == 0.0 { 0.0 } else { z.im };
    let re = if z.re == 0.0 { 0.0 } else { z.re };
    if im.is_sign_negative() {
        format!("{re}-{}i", -im)
    } else {
        format!("{re}+{im}i")
    }
}

/// Parses `a+bi`, `a-bi` or a bare real `a`. Exponents (`1e-3`) are allowed.
pub fn parse_complex(text: &str) -> Option<Complex64> {
    let t = text.trim();
    if t.is_empty() {
        return None;
    }
    let Some(body) = t.strip_suffix('i') else {
        return parse_real(t).map(|re| Complex64::new(re, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'))?;
    let re = parse_real(&body[..split])?;
    let im_text = &body[split..];
    let im = match im_text {
        "+" => 1.0,
        "-" => -1.0,
        _ => parse_real(im_text)?,
    };
    Some(Complex64::new(re, im))
}

fn parse_real(t: &str) -> Option<f64> {
    let ok = !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit() || matches!(b, b'.' | b'+' | b'-' | b'e' | b'E'));
    if !ok {
        return None;
    }
    t.parse::<f64>().ok().filter(|v| v.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_common_forms() {
        assert_eq!(parse_complex("0.5+0.25i"), Some(Complex64::new(0.5, 0.25)));
        assert_eq!(parse_complex("-1-2i"), Some(Complex64::new(-1.0, -2.0)));
        assert_eq!(parse_complex("1e-3-2E+2i"), Some(Complex64::new(1e-3, -200.0)));
        assert_eq!(parse_complex("0.625"), Some(Complex64::new(0.625, 0.0)));
        assert_eq!(parse_complex("1,5+0i"), None);
        assert_eq!(parse_complex("abc"), None);
    }

    #[test]
    fn format_round_trips() {
        for z in [
            Complex64::new(0.1, -0.2),
            Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            Complex64::new(-0.0, -0.0),
            Complex64::new(1e-17, 3.5e12),
        ] {
            let back = parse_complex(&format_complex(z)).unwrap();
            assert_eq!(back, z + Complex64::new(0.0, 0.0));
        }
    }
}
