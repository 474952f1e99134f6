use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use super::{BlockCount, TailGenerator, TailRule, TreeMappingSpec};
use crate::error::{Error, Result};
use crate::numtheory::{MeasureParams, Word};

const TOP_LEVEL_KEYS: &[&str] = &[
    "q",
    "b",
    "base_residues",
    "tail_rule",
    "overrides",
    "irregular_paths",
    "regularized_stems",
    "validation",
];

impl TreeMappingSpec {
    /// The mapping-spec JSON document.
    pub fn to_json(&self) -> Value {
        let tail_rule = match self.tail_rule() {
            TailRule::AllZero => json!({ "kind": "all_zero" }),
            TailRule::SparsePowers { exponents, digit, growth } => {
                let mut v = json!({ "kind": "sparse_powers", "exponents": exponents, "digit": digit });
                if let Some(g) = growth {
                    v["growth"] = json!(g);
                }
                v
            }
            TailRule::LeadingBlock { digit, count } => {
                let count = match count {
                    BlockCount::Constant(c) => json!({ "kind": "constant", "value": c }),
                    BlockCount::IteratedLog { base } => json!({ "kind": "iterated_log", "base": base }),
                    BlockCount::LevelLog { coefficient, base } => {
                        json!({ "kind": "level_log", "coefficient": coefficient, "base": base })
                    }
                };
                json!({ "kind": "leading_block", "digit": digit, "count": count })
            }
            TailRule::Custom { entries } => json!({
                "kind": "custom",
                "entries": entries
                    .iter()
                    .map(|((stem, ell), d)| json!({ "stem": stem, "ell": ell, "digit": d }))
                    .collect::<Vec<_>>(),
            }),
        };
        let mut v = json!({
            "q": self.params().q(),
            "b": self.params().b(),
            "base_residues": self.base_residues(),
            "tail_rule": tail_rule,
            "overrides": self
                .overrides()
                .iter()
                .map(|(w, d)| json!({ "word": w, "digit": d }))
                .collect::<Vec<_>>(),
            "irregular_paths": self
                .irregular_paths()
                .iter()
                .map(|(s, g)| json!({ "stem": s, "tail_digits": g.to_string() }))
                .collect::<Vec<_>>(),
        });
        if !self.regularized_stems().is_empty() {
            v["regularized_stems"] = json!(self.regularized_stems());
        }
        v
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(s).map_err(|e| Error::schema("$", e.to_string()))?;
        Self::from_json_value(&v)
    }

    pub fn from_json_value(v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| Error::schema("$", "expected an object"))?;
        if let Some(k) = obj.keys().find(|k| !TOP_LEVEL_KEYS.contains(&k.as_str())) {
            return Err(Error::schema(k.clone(), "unknown field"));
        }
        let q = uint(field(obj, "q", "q")?, "q")? as u32;
        let b = uint(field(obj, "b", "b")?, "b")? as u32;
        let params = MeasureParams::new(q, b).map_err(|e| Error::schema("q", e.to_string()))?;
        params.require_r().map_err(|e| Error::schema("b", e.to_string()))?;

        let residues = array(field(obj, "base_residues", "base_residues")?, "base_residues")?
            .iter()
            .enumerate()
            .map(|(i, x)| int(x, &format!("base_residues[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        if residues.len() != q as usize {
            return Err(Error::schema("base_residues", format!("expected {q} entries, got {}", residues.len())));
        }

        let tail_rule = parse_tail_rule(field(obj, "tail_rule", "tail_rule")?, q)?;
        let mut spec = TreeMappingSpec::new(params, residues, tail_rule).map_err(|e| Error::schema("tail_rule", e.to_string()))?;

        if let Some(list) = obj.get("overrides") {
            for (i, item) in array(list, "overrides")?.iter().enumerate() {
                let path = format!("overrides[{i}]");
                let o = item.as_object().ok_or_else(|| Error::schema(&path, "expected an object"))?;
                let word = word(field(o, "word", &path)?, &format!("{path}.word"), q)?;
                let digit = int(field(o, "digit", &path)?, &format!("{path}.digit"))?;
                spec = spec.with_override(word, digit).map_err(|e| Error::schema(format!("{path}.word"), e.to_string()))?;
            }
        }
        if let Some(list) = obj.get("irregular_paths") {
            for (i, item) in array(list, "irregular_paths")?.iter().enumerate() {
                let path = format!("irregular_paths[{i}]");
                let o = item.as_object().ok_or_else(|| Error::schema(&path, "expected an object"))?;
                let stem = word(field(o, "stem", &path)?, &format!("{path}.stem"), q)?;
                let gen = field(o, "tail_digits", &path)?
                    .as_str()
                    .ok_or_else(|| Error::schema(format!("{path}.tail_digits"), "expected a generator name"))?;
                let gen = TailGenerator::parse(gen, q).map_err(|e| relocate(e, &format!("{path}.tail_digits")))?;
                spec = spec.with_irregular_path(stem, gen).map_err(|e| Error::schema(format!("{path}.stem"), e.to_string()))?;
            }
        }
        if let Some(list) = obj.get("regularized_stems") {
            for (i, item) in array(list, "regularized_stems")?.iter().enumerate() {
                let path = format!("regularized_stems[{i}]");
                let stem = word(item, &path, q)?;
                spec = spec.with_regularized_stem(stem).map_err(|e| Error::schema(&path, e.to_string()))?;
            }
        }
        Ok(spec)
    }
}

fn relocate(e: Error, path: &str) -> Error {
    match e {
        Error::Schema { message, .. } => Error::schema(path, message),
        other => Error::schema(path, other.to_string()),
    }
}

fn field<'a>(o: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    o.get(key).ok_or_else(|| {
        let at = if path == key { key.to_string() } else { format!("{path}.{key}") };
        Error::schema(at, "missing field")
    })
}

fn uint(v: &Value, path: &str) -> Result<u64> {
    v.as_u64().ok_or_else(|| Error::schema(path, format!("expected a nonnegative integer, got {v}")))
}

fn int(v: &Value, path: &str) -> Result<i32> {
    v.as_i64()
        .and_then(|x| i32::try_from(x).ok())
        .ok_or_else(|| Error::schema(path, format!("expected a 32-bit integer, got {v}")))
}

fn float(v: &Value, path: &str) -> Result<f64> {
    v.as_f64().ok_or_else(|| Error::schema(path, format!("expected a number, got {v}")))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::schema(path, "expected an array"))
}

fn word(v: &Value, path: &str, q: u32) -> Result<Word> {
    let letters = array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let l = uint(x, &format!("{path}[{i}]"))?;
            if l >= q as u64 {
                return Err(Error::schema(format!("{path}[{i}]"), format!("letter {l} outside alphabet of size {q}")));
            }
            Ok(l as u32)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Word(letters))
}

fn parse_tail_rule(v: &Value, q: u32) -> Result<TailRule> {
    let o = v.as_object().ok_or_else(|| Error::schema("tail_rule", "expected an object"))?;
    let kind = field(o, "kind", "tail_rule")?
        .as_str()
        .ok_or_else(|| Error::schema("tail_rule.kind", "expected a string"))?;
    match kind {
        "all_zero" => Ok(TailRule::AllZero),
        "sparse_powers" => {
            let exponents = array(field(o, "exponents", "tail_rule")?, "tail_rule.exponents")?
                .iter()
                .enumerate()
                .map(|(i, x)| uint(x, &format!("tail_rule.exponents[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            let digit = match o.get("digit") {
                Some(d) => int(d, "tail_rule.digit")?,
                None => q as i32,
            };
            let growth = match o.get("growth") {
                Some(g) => Some(g.as_str().ok_or_else(|| Error::schema("tail_rule.growth", "expected a string"))?.to_string()),
                None => None,
            };
            Ok(TailRule::SparsePowers { exponents, digit, growth })
        }
        "leading_block" => {
            let digit = int(field(o, "digit", "tail_rule")?, "tail_rule.digit")?;
            let c = field(o, "count", "tail_rule")?
                .as_object()
                .ok_or_else(|| Error::schema("tail_rule.count", "expected an object"))?;
            let ckind = field(c, "kind", "tail_rule.count")?
                .as_str()
                .ok_or_else(|| Error::schema("tail_rule.count.kind", "expected a string"))?;
            let count = match ckind {
                "constant" => BlockCount::Constant(uint(field(c, "value", "tail_rule.count")?, "tail_rule.count.value")?),
                "iterated_log" => BlockCount::IteratedLog { base: float(field(c, "base", "tail_rule.count")?, "tail_rule.count.base")? },
                "level_log" => BlockCount::LevelLog {
                    coefficient: float(field(c, "coefficient", "tail_rule.count")?, "tail_rule.count.coefficient")?,
                    base: float(field(c, "base", "tail_rule.count")?, "tail_rule.count.base")?,
                },
                other => return Err(Error::schema("tail_rule.count.kind", format!("unknown count kind {other:?}"))),
            };
            Ok(TailRule::LeadingBlock { digit, count })
        }
        "custom" => {
            let mut entries = BTreeMap::new();
            for (i, item) in array(field(o, "entries", "tail_rule")?, "tail_rule.entries")?.iter().enumerate() {
                let path = format!("tail_rule.entries[{i}]");
                let e = item.as_object().ok_or_else(|| Error::schema(&path, "expected an object"))?;
                let stem = word(field(e, "stem", &path)?, &format!("{path}.stem"), q)?;
                if stem.letters().last().map_or(true, |&l| l == 0) {
                    return Err(Error::schema(format!("{path}.stem"), "a stem must end in a nonzero letter"));
                }
                let ell = uint(field(e, "ell", &path)?, &format!("{path}.ell"))?;
                if ell == 0 {
                    return Err(Error::schema(format!("{path}.ell"), "tail offsets start at 1"));
                }
                let digit = int(field(e, "digit", &path)?, &format!("{path}.digit"))?;
                entries.insert((stem, ell), digit);
            }
            Ok(TailRule::Custom { entries })
        }
        other => Err(Error::schema("tail_rule.kind", format!("unknown tail rule {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::compute_mask_constants;
    use crate::growth::GrowthFn;
    use crate::treemap::{canonical_spec, nonspectrum_spec, slow_growth_spec, sparse_spec};

    #[test]
    fn round_trips() {
        let p = MeasureParams::new(2, 4).unwrap();
        let mc = compute_mask_constants(&p, 1e-3).unwrap();
        let specs = vec![
            canonical_spec(&p).unwrap(),
            sparse_spec(&p, &GrowthFn::Log2, 10).unwrap(),
            nonspectrum_spec(&p, 1.0, &mc).unwrap(),
            slow_growth_spec(&p, &mc).unwrap(),
            canonical_spec(&p)
                .unwrap()
                .with_override(Word(vec![1, 1]), -1)
                .unwrap()
                .with_irregular_path(Word(vec![1]), TailGenerator::Doubling { digit: 2 })
                .unwrap(),
        ];
        for s in specs {
            let text = s.to_json().to_string();
            assert_eq!(TreeMappingSpec::from_json_str(&text).unwrap(), s);
        }
    }

    #[test]
    fn schema_paths() {
        let err = |s: &str| match TreeMappingSpec::from_json_str(s) {
            Err(Error::Schema { path, .. }) => path,
            other => panic!("{other:?}"),
        };
        let base = r#""q":2,"b":4,"base_residues":[0,1],"tail_rule":{"kind":"all_zero"}"#;
        assert_eq!(err(&format!("{{{base},\"overrides\":[{{\"word\":[1,2],\"digit\":1}}]}}")), "overrides[0].word[1]");
        assert_eq!(err(&format!("{{{base},\"overrides\":[{{\"word\":[0,0],\"digit\":0}}]}}")), "overrides[0].word");
        assert_eq!(err(r#"{"q":2,"b":4,"base_residues":[0],"tail_rule":{"kind":"all_zero"}}"#), "base_residues");
        assert_eq!(err(r#"{"q":2,"b":4,"base_residues":[0,1],"tail_rule":{"kind":"dense"}}"#), "tail_rule.kind");
        assert_eq!(err(&format!("{{{base},\"extra\":1}}")), "extra");
        assert_eq!(err("[1,2"), "$");
        assert_eq!(err(r#"{"q":2,"b":5,"base_residues":[0,1],"tail_rule":{"kind":"all_zero"}}"#), "b");
    }
}
