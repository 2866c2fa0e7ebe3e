//! Table rendering for basis/dof/coefficient listings in json, csv and
//! plain text. All three formats carry the same content.

use crspace_core::basis::CrBasis;
use crspace_core::complex::SimplicialComplex;
use crspace_core::dofs::{Carrier, DofSet};
use crspace_core::num::{render, Rational};
use serde_json::{json, Value};
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutFormat {
    Json,
    Csv,
    Plain,
}

impl std::str::FromStr for OutFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(OutFormat::Json),
            "csv" => Ok(OutFormat::Csv),
            "plain" => Ok(OutFormat::Plain),
            other => Err(format!("unknown format '{other}' (json|csv|plain)")),
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn csv_line(fields: &[String]) -> String {
    fields
        .iter()
        .map(|f| csv_field(f))
        .collect::<Vec<_>>()
        .join(",")
}

/// One row per basis member: tag, support, per-simplex polynomial in the
/// barycentric variables `l0..ld` of each simplex (ascending vertex order).
pub fn basis_table(_cx: &SimplicialComplex, basis: &CrBasis, format: OutFormat) -> String {
    let rows: Vec<(usize, String, String, usize, Vec<(usize, String)>)> = basis
        .entries
        .iter()
        .enumerate()
        .map(|(i, (tag, f))| {
            let support: Vec<String> =
                f.support().map(|k| k.to_string()).collect();
            let polys: Vec<(usize, String)> = f
                .support()
                .map(|k| (k, f.part(k).render_with('l')))
                .collect();
            (i, tag.render(), support.join(" "), f.degree(), polys)
        })
        .collect();
    match format {
        OutFormat::Json => {
            let items: Vec<Value> = rows
                .into_iter()
                .map(|(i, tag, support, degree, polys)| {
                    let pieces: Vec<Value> = polys
                        .into_iter()
                        .map(|(k, p)| json!({"simplex": k, "poly": p}))
                        .collect();
                    json!({
                        "index": i,
                        "tag": tag,
                        "support": support,
                        "degree": degree,
                        "pieces": pieces,
                    })
                })
                .collect();
            let doc = json!({
                "order": basis.k,
                "bc": basis.bc.as_str(),
                "count": basis.len(),
                "dropped_simplex": basis.dropped_simplex,
                "members": items,
            });
            serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
        }
        OutFormat::Csv => {
            let mut out = String::new();
            if let Some(kk) = basis.dropped_simplex {
                let _ = writeln!(out, "# even-order full basis: simplex {kk} dropped");
            }
            let _ = writeln!(out, "index,tag,support,degree,pieces");
            for (i, tag, support, degree, polys) in rows {
                let pieces = polys
                    .iter()
                    .map(|(k, p)| format!("K{k}: {p}"))
                    .collect::<Vec<_>>()
                    .join("; ");
                let _ = writeln!(
                    out,
                    "{}",
                    csv_line(&[
                        i.to_string(),
                        tag,
                        support,
                        degree.to_string(),
                        pieces
                    ])
                );
            }
            out
        }
        OutFormat::Plain => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "basis: order {} bc {} members {}",
                basis.k,
                basis.bc.as_str(),
                basis.len()
            );
            if let Some(kk) = basis.dropped_simplex {
                let _ = writeln!(out, "note: even-order full basis drops simplex {kk}");
            }
            for (i, tag, support, degree, polys) in rows {
                let _ = writeln!(out, "[{i}] {tag} support {{{support}}} degree {degree}");
                for (k, p) in polys {
                    let _ = writeln!(out, "    on K{k}: {p}");
                }
            }
            let _ = writeln!(out, "variables: l0..ld are the barycentric coordinates of each simplex, ascending vertex order");
            out
        }
    }
    .to_string()
}

fn carrier_string(c: &Carrier) -> String {
    match c {
        Carrier::Simplex(k) => format!("simplex:{k}"),
        Carrier::Facet { facet, side } => format!("facet:{facet}:side{side}"),
    }
}

/// One row per degree of freedom: dual tag, carrier, scale, weight.
pub fn dof_table(_cx: &SimplicialComplex, dofs: &DofSet, format: OutFormat) -> String {
    let rows: Vec<(usize, String, String, String, usize, String)> = dofs
        .functionals
        .iter()
        .enumerate()
        .map(|(i, f)| {
            (
                i,
                f.tag.render(),
                carrier_string(&f.carrier),
                render(&f.scale),
                f.weight_degree(),
                f.weight.render_with('l'),
            )
        })
        .collect();
    match format {
        OutFormat::Json => {
            let items: Vec<Value> = rows
                .into_iter()
                .map(|(i, tag, carrier, scale, wdeg, weight)| {
                    json!({
                        "index": i,
                        "dual_tag": tag,
                        "carrier": carrier,
                        "scale": scale,
                        "weight_degree": wdeg,
                        "weight": weight,
                    })
                })
                .collect();
            let doc = json!({
                "order": dofs.k,
                "bc": dofs.bc.as_str(),
                "count": dofs.len(),
                "functionals": items,
            });
            serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
        }
        OutFormat::Csv => {
            let mut out = String::from("index,dual_tag,carrier,scale,weight_degree,weight\n");
            for (i, tag, carrier, scale, wdeg, weight) in rows {
                let _ = writeln!(
                    out,
                    "{}",
                    csv_line(&[
                        i.to_string(),
                        tag,
                        carrier,
                        scale,
                        wdeg.to_string(),
                        weight
                    ])
                );
            }
            out
        }
        OutFormat::Plain => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "degrees of freedom: order {} bc {} count {}",
                dofs.k,
                dofs.bc.as_str(),
                dofs.len()
            );
            for (i, tag, carrier, scale, wdeg, weight) in rows {
                let _ = writeln!(out, "[{i}] dual to {tag} on {carrier} scale {scale}");
                let _ = writeln!(out, "    weight (degree {wdeg}): {weight}");
            }
            let _ = writeln!(out, "facet carriers pair with the measure-normalized integral (1/|F|) int_F");
            out
        }
    }
}

/// Coefficient listing for interpolation output.
pub fn coefficient_table(
    tags: &[String],
    exact: Option<&[Rational]>,
    floats: Option<&[f64]>,
    meta: &[(String, String)],
    format: OutFormat,
) -> String {
    let n = tags.len();
    match format {
        OutFormat::Json => {
            let items: Vec<Value> = (0..n)
                .map(|i| {
                    let mut obj = serde_json::Map::new();
                    obj.insert("index".into(), json!(i));
                    obj.insert("tag".into(), json!(tags[i]));
                    if let Some(ex) = exact {
                        obj.insert("coefficient".into(), json!(render(&ex[i])));
                    }
                    if let Some(fl) = floats {
                        obj.insert("coefficient_f64".into(), json!(fl[i]));
                    }
                    Value::Object(obj)
                })
                .collect();
            let mut doc = serde_json::Map::new();
            for (k, v) in meta {
                doc.insert(k.clone(), json!(v));
            }
            doc.insert("coefficients".into(), Value::Array(items));
            serde_json::to_string_pretty(&Value::Object(doc)).expect("serializable") + "\n"
        }
        OutFormat::Csv => {
            let mut out = String::new();
            for (k, v) in meta {
                let _ = writeln!(out, "# {k}: {v}");
            }
            let _ = writeln!(out, "index,tag,coefficient");
            for i in 0..n {
                let c = match (exact, floats) {
                    (Some(ex), _) => render(&ex[i]),
                    (None, Some(fl)) => format!("{}", fl[i]),
                    _ => String::new(),
                };
                let _ = writeln!(out, "{}", csv_line(&[i.to_string(), tags[i].clone(), c]));
            }
            out
        }
        OutFormat::Plain => {
            let mut out = String::new();
            for (k, v) in meta {
                let _ = writeln!(out, "{k}: {v}");
            }
            for i in 0..n {
                let c = match (exact, floats) {
                    (Some(ex), _) => render(&ex[i]),
                    (None, Some(fl)) => format!("{}", fl[i]),
                    _ => String::new(),
                };
                let _ = writeln!(out, "[{i}] {} = {c}", tags[i]);
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quoting() {
        assert_eq!(csv_line(&["a".into(), "b,c".into()]), "a,\"b,c\"");
        assert_eq!(csv_line(&["say \"hi\"".into()]), "\"say \"\"hi\"\"\"");
    }
}
