//! Plain-text model file.
//!
//! ```text
//! thermal-track-svm v1
//! classes 1 2 3 4
//! norm_mean <4 values>
//! norm_std <4 values>
//! pair <positive> <negative>
//! C <value>
//! gamma <value>
//! bias <value>
//! n_sv <count>
//! <label>,<alpha*y>,<f1>,<f2>,<f3>,<f4>
//! ...
//! ```
//!
//! Values use the shortest round-trip decimal form, so save/load is
//! bit-exact.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::svm::{Normalization, PairModel, SupportVector, SvmModel};
use super::{ClassLabel, FEATURE_DIM};

pub const MODEL_HEADER: &str = "thermal-track-svm v1";

fn join<T: Scalar>(vals: &[T]) -> String {
    vals.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn save_model<T: Scalar>(model: &SvmModel<T>) -> String {
    let mut out = String::new();
    writeln!(out, "{MODEL_HEADER}").unwrap();
    let classes: Vec<String> = model.classes.iter().map(|c| c.to_string()).collect();
    writeln!(out, "classes {}", classes.join(" ")).unwrap();
    writeln!(out, "norm_mean {}", join(&model.normalization.mean)).unwrap();
    writeln!(out, "norm_std {}", join(&model.normalization.std)).unwrap();
    for p in &model.pairs {
        writeln!(out, "pair {} {}", p.positive, p.negative).unwrap();
        writeln!(out, "C {}", p.c).unwrap();
        writeln!(out, "gamma {}", p.gamma).unwrap();
        writeln!(out, "bias {}", p.bias).unwrap();
        writeln!(out, "n_sv {}", p.support.len()).unwrap();
        for sv in &p.support {
            write!(out, "{},{}", sv.label, sv.coef).unwrap();
            for v in &sv.x {
                write!(out, ",{v}").unwrap();
            }
            out.push('\n');
        }
    }
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn next_line(&mut self) -> Option<(usize, &'a str)> {
        self.inner
            .by_ref()
            .map(|(i, l)| (i + 1, l.trim()))
            .find(|(_, l)| !l.is_empty())
    }

    fn expect(&mut self, key: &str) -> Result<(usize, &'a str)> {
        let (no, line) = self
            .next_line()
            .ok_or_else(|| Error::Format(format!("unexpected end of model file, expected `{key}`")))?;
        match line.split_once(' ') {
            Some((k, rest)) if k == key => Ok((no, rest.trim())),
            _ => Err(Error::Parse {
                line: no,
                msg: format!("expected `{key}`"),
            }),
        }
    }
}

fn parse_num<V: std::str::FromStr>(s: &str, line: usize) -> Result<V> {
    s.trim().parse().map_err(|_| Error::Parse {
        line,
        msg: format!("bad number {s:?}"),
    })
}

fn parse_features<T: Scalar>(s: &str, sep: char, line: usize) -> Result<[T; FEATURE_DIM]> {
    let vals = s
        .split(sep)
        .filter(|t| !t.is_empty())
        .map(|t| parse_num::<T>(t, line))
        .collect::<Result<Vec<T>>>()?;
    vals.try_into().map_err(|_| Error::Parse {
        line,
        msg: format!("expected {FEATURE_DIM} values"),
    })
}

pub fn load_model<T: Scalar>(text: &str) -> Result<SvmModel<T>> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
    };
    match lines.next_line() {
        Some((_, h)) if h == MODEL_HEADER => {}
        Some((_, h)) => {
            return Err(Error::Format(format!(
                "expected model header `{MODEL_HEADER}`, found `{h}`"
            )))
        }
        None => return Err(Error::Format(format!("empty model file, expected `{MODEL_HEADER}`"))),
    }
    let (no, cls) = lines.expect("classes")?;
    let classes = cls
        .split_whitespace()
        .map(|t| parse_num::<ClassLabel>(t, no))
        .collect::<Result<Vec<_>>>()?;
    if classes.len() < 2 || classes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Parse {
            line: no,
            msg: "classes must be at least two ascending labels".into(),
        });
    }
    let (no, m) = lines.expect("norm_mean")?;
    let mean = parse_features(m, ' ', no)?;
    let (no, s) = lines.expect("norm_std")?;
    let std = parse_features(s, ' ', no)?;

    let n_pairs = classes.len() * (classes.len() - 1) / 2;
    let mut pairs = Vec::with_capacity(n_pairs);
    for _ in 0..n_pairs {
        let (no, p) = lines.expect("pair")?;
        let ids: Vec<ClassLabel> = p
            .split_whitespace()
            .map(|t| parse_num(t, no))
            .collect::<Result<_>>()?;
        let [positive, negative] = ids[..] else {
            return Err(Error::Parse {
                line: no,
                msg: "pair needs two labels".into(),
            });
        };
        let (no, c) = lines.expect("C")?;
        let c: T = parse_num(c, no)?;
        let (no, g) = lines.expect("gamma")?;
        let gamma: T = parse_num(g, no)?;
        let (no, b) = lines.expect("bias")?;
        let bias: T = parse_num(b, no)?;
        let (no, n) = lines.expect("n_sv")?;
        let n_sv: usize = parse_num(n, no)?;
        let mut support = Vec::with_capacity(n_sv);
        for _ in 0..n_sv {
            let (no, row) = lines
                .next_line()
                .ok_or_else(|| Error::Format("truncated support vector block".into()))?;
            let mut parts = row.splitn(3, ',');
            let label = parse_num(parts.next().unwrap_or(""), no)?;
            let coef = parse_num(parts.next().unwrap_or(""), no)?;
            let x = parse_features(parts.next().unwrap_or(""), ',', no)?;
            support.push(SupportVector { label, coef, x });
        }
        pairs.push(PairModel {
            positive,
            negative,
            c,
            gamma,
            bias,
            support,
        });
    }
    if let Some((no, _)) = lines.next_line() {
        return Err(Error::Parse {
            line: no,
            msg: "trailing content after last pair".into(),
        });
    }
    Ok(SvmModel {
        classes,
        normalization: Normalization { mean, std },
        pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{train_svm, Dataset, Sample, SvmParams};

    fn model() -> SvmModel<f64> {
        let rows = (0..24)
            .map(|i| {
                let label = (i % 4 + 1) as u8;
                let l = label as f64;
                Sample {
                    features: [3.0 * l + (i as f64 * 0.7).sin(), l, 2.0 * l, l + (i % 2) as f64],
                    label,
                }
            })
            .collect();
        train_svm(&Dataset::new(rows).unwrap(), &SvmParams::new(21.0, 0.0078)).unwrap()
    }

    #[test]
    fn roundtrip_is_bit_exact() {
        let m = model();
        let text = save_model(&m);
        let back: SvmModel<f64> = load_model(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(save_model(&back), text);
    }

    #[test]
    fn version_mismatch_names_expected_header() {
        let text = save_model(&model()).replacen("v1", "v0", 1);
        match load_model::<f64>(&text) {
            Err(Error::Format(msg)) => assert!(msg.contains(MODEL_HEADER)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn truncated_file_is_rejected() {
        let text = save_model(&model());
        let cut = &text[..text.len() / 2];
        assert!(load_model::<f64>(cut).is_err());
    }
}
