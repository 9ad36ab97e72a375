//! Browser demo: supercharacter tables, classification and tower convergence
//! exposed to JavaScript. Every export returns a JSON string.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use superchar_core::aftower::{convergence_report, FieldTower, TowerLabel};
use superchar_core::caps::Caps;
use superchar_core::dualspace::dual_canonical_fast;
use superchar_core::exactfield::FiniteField;
use superchar_core::nilalg::{algebra_order, NilMatrix};
use superchar_core::sctheory::{build_table, rational_string};
use superchar_core::setpartitions::{parse_colours, SetPartition};
use superchar_core::superclasses::{canonical_form_with_caps, SuperclassLabel};

/// Largest `|u_n(F_q)|` the page will tabulate.
pub const TABLE_LIMIT: u128 = 1 << 12;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn field(p: u32, degree: u32) -> Result<FiniteField, String> {
    FiniteField::with_caps(
        p,
        degree,
        &Caps {
            elements: 1 << 10,
            orbit: 1 << 16,
        },
    )
    .map_err(err)
}

/// Table with rendered labels and values, for display.
pub fn table_json(n: usize, p: u32, degree: u32) -> Result<String, String> {
    let f = field(p, degree)?;
    let size = algebra_order(n, &f);
    if size > TABLE_LIMIT {
        return Err(format!("|A| = {size} is above the demo limit {TABLE_LIMIT}"));
    }
    let t = build_table(n, &f, &Caps::default(), None).map_err(err)?;
    let v = json!({
        "n": n,
        "q": f.order(),
        "rows": t.rows.iter().map(|r| json!({"label": r.label.render(&f), "size": r.size, "weight": rational_string(&r.weight)})).collect::<Vec<_>>(),
        "cols": t.cols.iter().map(|c| json!({"label": c.label.render(&f), "size": c.size})).collect::<Vec<_>>(),
        "values": t.values.iter().map(|row| row.iter().map(|v| v.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "validated_pairs": t.validated_pairs,
    });
    Ok(v.to_string())
}

/// Canonical superclass (or dual orbit) label of a matrix such as `a12=1,a13=1`.
pub fn classify_json(n: usize, p: u32, degree: u32, matrix: &str, dual: bool) -> Result<String, String> {
    let f = field(p, degree)?;
    let a = NilMatrix::parse(matrix, n, &f).map_err(err)?;
    let caps = Caps::default();
    let label = if dual {
        dual_canonical_fast(&a, &caps).map_err(err)?.render(&f)
    } else {
        canonical_form_with_caps(&a, &caps).map_err(err)?.render(&f)
    };
    Ok(json!({"matrix": a.to_string(), "kind": if dual { "dual" } else { "superclass" }, "label": label}).to_string())
}

/// Level values of a supercharacter along a tower, with the limit and verdict.
pub fn tower_json(
    n: usize,
    p: u32,
    degrees: &str,
    pi: &str,
    colours: &str,
    superclass: &str,
    superclass_colours: &str,
) -> Result<String, String> {
    let degrees: Vec<u32> = degrees
        .split(',')
        .map(|d| d.trim().parse::<u32>().map_err(|e| format!("degree {d:?}: {e}")))
        .collect::<Result<_, _>>()?;
    let caps = Caps {
        elements: 1 << 12,
        orbit: 1 << 16,
    };
    let tower = FieldTower::new(p, &degrees, &caps).map_err(err)?;
    let f1 = tower.field(1).map_err(err)?;
    let label = TowerLabel::from_level(
        &tower,
        SetPartition::parse(pi, n).map_err(err)?,
        1,
        &parse_colours(colours, f1).map_err(err)?,
    )
    .map_err(err)?;
    let class = SuperclassLabel::new(
        SetPartition::parse(superclass, n).map_err(err)?,
        parse_colours(superclass_colours, f1).map_err(err)?,
    )
    .map_err(err)?;
    let rep = convergence_report(&tower, &label, &class, 1, tower.levels()).map_err(err)?;
    let levels: Vec<Value> = rep
        .levels
        .iter()
        .map(|l| json!({"level": l.level, "q": l.q, "value": l.value.as_ref().map(|v| v.to_string()), "magnitude": l.magnitude}))
        .collect();
    Ok(json!({"levels": levels, "limit": rep.limit.to_string(), "verdict": rep.verdict.to_string()}).to_string())
}

#[wasm_bindgen(js_name = supercharacterTable)]
pub fn supercharacter_table(n: usize, p: u32, degree: u32) -> Result<String, JsValue> {
    table_json(n, p, degree).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn classify(n: usize, p: u32, degree: u32, matrix: &str, dual: bool) -> Result<String, JsValue> {
    classify_json(n, p, degree, matrix, dual).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = towerConvergence)]
pub fn tower_convergence(
    n: usize,
    p: u32,
    degrees: &str,
    pi: &str,
    colours: &str,
    superclass: &str,
    superclass_colours: &str,
) -> Result<String, JsValue> {
    tower_json(n, p, degrees, pi, colours, superclass, superclass_colours).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_for_u3_f2() {
        let v: Value = serde_json::from_str(&table_json(3, 2, 1).unwrap()).unwrap();
        assert_eq!(v["values"][4], json!(["1", "0", "0", "0", "-1"]));
        assert_eq!(v["rows"][4]["weight"], "1/2");
        assert!(table_json(6, 3, 1).is_err());
    }

    #[test]
    fn classify_both_kinds() {
        let v: Value = serde_json::from_str(&classify_json(3, 2, 1, "a12=1,a13=1", false).unwrap()).unwrap();
        assert_eq!(v["label"], "1,2/3 {1,2=[1]}");
        let v: Value = serde_json::from_str(&classify_json(3, 2, 1, "a12=1,a13=1", true).unwrap()).unwrap();
        assert_eq!(v["label"], "1,3/2 {1,3=[1]}");
        assert!(classify_json(3, 2, 1, "a21=1", false).is_err());
    }

    #[test]
    fn tower_decay() {
        let v: Value =
            serde_json::from_str(&tower_json(4, 2, "1,2,6", "1,4/2/3", "1,4=1", "1/2,3/4", "2,3=1").unwrap()).unwrap();
        let mags: Vec<&str> = v["levels"]
            .as_array()
            .unwrap()
            .iter()
            .map(|l| l["magnitude"].as_str().unwrap())
            .collect();
        assert_eq!(mags, ["1/2", "1/4", "1/64"]);
        assert_eq!(v["limit"], "0");
    }
}
