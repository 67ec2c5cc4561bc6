//! State labels and plain-text tables.

use qsteer_core::{DecisionRule, MeasurementSet, Policy, StateGraph};

use crate::error::Result;

const LABEL_TOL: f64 = 1e-9;

/// Names every graph state: `|k>` for basis states, `|label>` when the state
/// equals the rank-one Kraus operator of an outcome, and `rho_<id>` otherwise.
pub fn state_labels(graph: &StateGraph, set: &MeasurementSet) -> Vec<String> {
    graph
        .states()
        .iter()
        .enumerate()
        .map(|(id, rho)| {
            let m = rho.matrix();
            if let Some(k) = (0..m.dim()).find(|&k| (m[(k, k)].re - 1.0).abs() <= LABEL_TOL) {
                return format!("|{k}>");
            }
            set.actions()
                .iter()
                .flat_map(|a| a.outcomes())
                .find(|o| o.kraus.max_abs_diff(m) <= LABEL_TOL)
                .map(|o| format!("|{}>", o.label))
                .unwrap_or_else(|| format!("rho_{id}"))
        })
        .collect()
}

/// Row order used by the tables: basis states by index, then the rest by id.
pub fn display_order(labels: &[String]) -> Vec<usize> {
    let basis_index = |l: &str| l.strip_prefix('|')?.strip_suffix('>')?.parse::<usize>().ok();
    let mut basis: Vec<(usize, usize)> = labels
        .iter()
        .enumerate()
        .filter_map(|(id, l)| basis_index(l).map(|k| (k, id)))
        .collect();
    basis.sort_unstable();
    let mut order: Vec<usize> = basis.iter().map(|&(_, id)| id).collect();
    let rest: Vec<usize> = (0..labels.len()).filter(|id| !order.contains(id)).collect();
    order.extend(rest);
    order
}

/// Column-aligned text table with a rule under the header.
pub fn render_text_table(header: &[String], rows: &[Vec<String>]) -> String {
    let cols = header.len();
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[String]| {
        let padded: Vec<String> = (0..cols)
            .map(|i| {
                let c = cells.get(i).map(String::as_str).unwrap_or("");
                format!("{c:<w$}", w = widths[i])
            })
            .collect();
        padded.join(" | ").trim_end().to_string()
    };
    let mut out = line(header);
    out.push('\n');
    out.push_str(&widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("-+-"));
    out.push('\n');
    for row in rows {
        out.push_str(&line(row));
        out.push('\n');
    }
    out
}

/// States occupied with positive probability at each step when following `policy`.
fn occupied(policy: &Policy, graph: &StateGraph, horizon: usize) -> Vec<Vec<bool>> {
    let mut layers = vec![vec![false; graph.len()]; horizon + 1];
    layers[0][graph.initial_id()] = true;
    for k in 0..horizon {
        for s in 0..graph.len() {
            if !layers[k][s] {
                continue;
            }
            let Some(ts) = policy.action(k, s).and_then(|a| graph.transitions(s, a)) else {
                continue;
            };
            for t in ts {
                layers[k + 1][t.next] = true;
            }
        }
    }
    layers
}

/// Renders a policy as states x steps.
///
/// Open-loop sequences show `*` where the state cannot occur at that step;
/// feedback policies show their decision in every state, `-` where none is
/// defined. Stationary policies render as a two-row table.
pub fn policy_table(policy: &Policy, graph: &StateGraph, set: &MeasurementSet, title: &str) -> Result<String> {
    policy.validate(set.len())?;
    let labels = state_labels(graph, set);
    let order = display_order(&labels);
    let name = |a: Option<usize>| a.map_or("-".to_string(), |a| set.actions()[a].name().to_string());

    if let DecisionRule::Stationary { .. } = policy.rule() {
        let mut header = vec!["x".to_string()];
        header.extend(order.iter().map(|&s| labels[s].clone()));
        let mut row = vec![title.to_string()];
        row.extend(order.iter().map(|&s| name(policy.action(0, s))));
        return Ok(render_text_table(&header, &[row]));
    }

    let n = policy.horizon().unwrap_or(0);
    let open_loop = matches!(policy.rule(), DecisionRule::Sequence { .. });
    let layers = open_loop.then(|| occupied(policy, graph, n));
    let mut header = vec![title.to_string()];
    header.extend((0..n).map(|k| format!("k={k}")));
    let rows: Vec<Vec<String>> = order
        .iter()
        .map(|&s| {
            let mut row = vec![labels[s].clone()];
            row.extend((0..n).map(|k| match &layers {
                Some(l) if !l[k][s] => "*".to_string(),
                _ => name(policy.action(k, s)),
            }));
            row
        })
        .collect();
    Ok(render_text_table(&header, &rows))
}

/// Formats `v` with six significant digits.
pub fn sig6(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    if v == 0.0 {
        return "0.00000".to_string();
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    let s = format!("{v:.decimals$}");
    // Rounding can carry into a new leading digit (9.999996 -> 10.00000).
    let digits = s.chars().filter(char::is_ascii_digit).collect::<String>();
    if digits.trim_start_matches('0').len() > 6 && decimals > 0 {
        format!("{v:.prec$}", prec = decimals - 1)
    } else {
        s
    }
}
