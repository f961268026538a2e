//! Text and JSON renderings of filtration tables and Tor pages.

use serde_json::{json, Map, Value};

use nilops::gf2::Gf2Matrix;
use nilops::modules::{FiniteUnstableAlgebra, ModuleElement, ModuleError, StructuredModule};
use nilops::nilfilt::{nilpotence_degree, FiltrationTable, NilError, NilpotenceCertificate};
use nilops::tor::{
    augmentation_nilpotence, column_nilpotence, word_label, ColumnNilpotence, TorError, TorPage,
    DIFFERENTIAL_SHAPE, SUSPENSION_CONVENTION,
};

/// `"d:i,j + d':k"`, the syntax `parse_element` reads back; `"0"` for zero.
pub fn element_spec(x: &ModuleElement) -> String {
    if x.is_zero() {
        return "0".into();
    }
    x.parts()
        .iter()
        .map(|(d, v)| format!("{d}:{}", v.ones().map(|i| i.to_string()).collect::<Vec<_>>().join(",")))
        .collect::<Vec<_>>()
        .join(" + ")
}

pub fn element_labels(m: &StructuredModule, x: &ModuleElement) -> Result<String, ModuleError> {
    if x.is_zero() {
        return Ok("0".into());
    }
    let mut out = Vec::new();
    for (&d, v) in x.parts() {
        for i in v.ones() {
            out.push(m.basis_label(d, i)?);
        }
    }
    Ok(out.join(" + "))
}

pub struct Certificate {
    degree: usize,
    index: usize,
    label: String,
    cert: NilpotenceCertificate,
}

/// A certificate for every basis element within the bound, up to level
/// `s_max + 1`.
pub fn certificates(m: &StructuredModule, s_max: usize, bound: usize, c_max: usize) -> Result<Vec<Certificate>, NilError> {
    let mut out = Vec::new();
    for d in 0..=bound {
        let dim = m.dim(d)?;
        for j in 0..dim {
            let x = ModuleElement::basis(d, dim, j);
            out.push(Certificate {
                degree: d,
                index: j,
                label: m.basis_label(d, j)?,
                cert: nilpotence_degree(m, &x, s_max + 1, c_max)?,
            });
        }
    }
    Ok(out)
}

fn row(dims: &[usize]) -> String {
    dims.iter().map(|d| format!("{d:>3}")).collect()
}

fn r_dims(table: &FiltrationTable, s: usize) -> Vec<usize> {
    table.quotients.get(&s).map(|r| r.dims().to_vec()).unwrap_or_default()
}

pub fn filtration_text(table: &FiltrationTable, s_max: usize, certs: &[Certificate]) -> String {
    let mut out = format!(
        "# filtration of {}: s_max = {s_max}, degree bound = {}, c_max = {}\n",
        table.module, table.degree_bound, table.c_max
    );
    out.push_str("# dims by degree; R_s is desuspended, so its column j is degree j + s of M_s\n");
    out.push_str(&format!("{:<8}{}\n", "degree", row(&(0..=table.degree_bound).collect::<Vec<_>>())));
    for s in 0..=s_max + 1 {
        out.push_str(&format!("{:<8}{}\n", format!("M_{s}"), row(&table.layer_dims(s))));
        if table.quotients.contains_key(&s) {
            out.push_str(&format!("{:<8}{}\n", format!("R_{s}"), row(&r_dims(table, s))));
        }
    }
    out.push_str("# certificates\n");
    for c in certs {
        out.push_str(&format!("{}.{} {}: {}\n", c.degree, c.index, c.label, c.cert));
    }
    out
}

fn certificate_json(c: &NilpotenceCertificate) -> Value {
    json!({
        "at_least": c.at_least(),
        "exact": c.exact(),
        "unknown": c.is_unknown(),
        "witnesses": c.witnesses.iter().map(|(k, n)| json!([k, n])).collect::<Vec<_>>(),
        "summary": c.to_string(),
    })
}

pub fn filtration_json(table: &FiltrationTable, s_max: usize, certs: &[Certificate]) -> Value {
    let layers: Vec<Value> = (0..=s_max + 1)
        .map(|s| {
            let mut v = json!({ "s": s, "m_dims": table.layer_dims(s) });
            if table.quotients.contains_key(&s) {
                v["r_dims"] = json!(r_dims(table, s));
            }
            v
        })
        .collect();
    let certs: Vec<Value> = certs
        .iter()
        .map(|c| {
            let mut v = certificate_json(&c.cert);
            v["degree"] = json!(c.degree);
            v["index"] = json!(c.index);
            v["label"] = json!(c.label);
            v
        })
        .collect();
    json!({
        "module": table.module,
        "s_max": s_max,
        "degree_bound": table.degree_bound,
        "c_max": table.c_max,
        "layers": layers,
        "certificates": certs,
    })
}

/// Nilpotence certificates for columns `1..=s_max`.
pub fn column_annotations(page: &TorPage, a: &FiniteUnstableAlgebra, c_max: usize) -> Result<Vec<ColumnNilpotence>, TorError> {
    let d = augmentation_nilpotence(a, c_max)?;
    (1..=page.s_max)
        .map(|s| column_nilpotence(page, a, s, Some(d), c_max))
        .collect()
}

fn holds_label(c: &ColumnNilpotence) -> &'static str {
    match c.holds() {
        Some(true) => "holds",
        Some(false) => "FAILS",
        None => "undetermined",
    }
}

/// Nonzero `Sq^i` blocks leaving bidegree `(s, t)`.
fn action(page: &TorPage, s: usize, t: usize) -> Vec<(usize, Gf2Matrix)> {
    let column = &page.columns[&s];
    (1..=t)
        .filter(|&i| t + i <= column.top_degree())
        .map(|i| (i, column.sq_block(i, t)))
        .filter(|(_, m)| !m.is_zero())
        .collect()
}

pub fn tor_text(page: &TorPage, a: &FiniteUnstableAlgebra, columns: &[ColumnNilpotence], c_max: usize) -> String {
    let mut out = format!(
        "# Tor over {}: s_max = {}, t_max = {}, c_max = {c_max}\n# {SUSPENSION_CONVENTION}\n# {DIFFERENTIAL_SHAPE}\n",
        page.algebra, page.s_max, page.t_max
    );
    out.push_str(&format!(
        "# checked: d^2 = 0 on {} pairs, Euler characteristic in {} degrees, descent of {} operations\n",
        page.checks.d_squared, page.checks.euler_degrees, page.checks.descent
    ));
    out.push_str(&page.chart());
    out.push_str("# classes\n");
    for (&(s, t), e) in &page.entries {
        if e.dim() == 0 {
            continue;
        }
        let reps: Vec<String> = e
            .representatives()
            .iter()
            .map(|r| r.iter().map(|w| word_label(a, w)).collect::<Vec<_>>().join(" + "))
            .collect();
        out.push_str(&format!("(-{s},{t}) dim {}: {}\n", e.dim(), reps.join("; ")));
        for (i, m) in action(page, s, t) {
            out.push_str(&format!("  Sq{i} -> (-{s},{}): {:?}\n", t + i, m.to_bits()));
        }
    }
    out.push_str("# columns\n");
    for c in columns {
        let complete = if c.complete { "complete" } else { "incomplete" };
        out.push_str(&format!("{c}: {} ({complete})\n", holds_label(c)));
    }
    out
}

pub fn tor_json(page: &TorPage, a: &FiniteUnstableAlgebra, columns: &[ColumnNilpotence], c_max: usize) -> Value {
    let mut entries = Map::new();
    for (&(s, t), e) in &page.entries {
        let reps: Vec<Vec<String>> = e
            .representatives()
            .iter()
            .map(|r| r.iter().map(|w| word_label(a, w)).collect())
            .collect();
        let mut act = Map::new();
        for (i, m) in action(page, s, t) {
            act.insert(format!("Sq{i}"), json!(m.to_bits()));
        }
        entries.insert(
            format!("(-{s},{t})"),
            json!({ "dim": e.dim(), "chain_dim": e.chain_dim, "representatives": reps, "action": act }),
        );
    }
    let cols: Vec<Value> = columns
        .iter()
        .map(|c| {
            let classes: Vec<Value> = c
                .classes
                .iter()
                .map(|((t, j), cert)| {
                    let mut v = certificate_json(cert);
                    v["t"] = json!(t);
                    v["index"] = json!(j);
                    v
                })
                .collect();
            json!({
                "s": c.s,
                "d": c.d,
                "bound": c.bound(),
                "complete": c.complete,
                "holds": c.holds(),
                "classes": classes,
            })
        })
        .collect();
    json!({
        "algebra": page.algebra,
        "s_max": page.s_max,
        "t_max": page.t_max,
        "c_max": c_max,
        "suspension_convention": SUSPENSION_CONVENTION,
        "differential_shape": DIFFERENTIAL_SHAPE,
        "checks": {
            "d_squared": page.checks.d_squared,
            "euler_degrees": page.checks.euler_degrees,
            "descent": page.checks.descent,
        },
        "connectivity_holds": page.connectivity_holds(),
        "entries": entries,
        "columns": cols,
    })
}
