//! CSV and JSON output. Reals are written with 17 significant digits in CSV;
//! JSON uses the shortest representation that parses back to the same double.

use serde::Serialize;

/// `x` in scientific notation with 17 significant digits.
pub fn real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Row-at-a-time CSV builder with a fixed header.
pub struct Csv {
    cols: usize,
    buf: String,
}

impl Csv {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        let mut buf = String::new();
        push_line(&mut buf, header);
        Self {
            cols: header.len(),
            buf,
        }
    }

    pub fn row<S: AsRef<str>>(&mut self, fields: &[S]) {
        assert_eq!(fields.len(), self.cols, "CSV row width");
        push_line(&mut self.buf, fields);
    }

    pub fn finish(self) -> Vec<u8> {
        self.buf.into_bytes()
    }
}

fn push_line<S: AsRef<str>>(buf: &mut String, fields: &[S]) {
    for (i, f) in fields.iter().enumerate() {
        if i > 0 {
            buf.push(',');
        }
        let f = f.as_ref();
        if f.contains([',', '"', '\n']) {
            buf.push('"');
            buf.push_str(&f.replace('"', "\"\""));
            buf.push('"');
        } else {
            buf.push_str(f);
        }
    }
    buf.push('\n');
}

/// Pretty JSON with struct field order as declared, newline-terminated.
pub fn json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("serializable report");
    out.push(b'\n');
    out
}
