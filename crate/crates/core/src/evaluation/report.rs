use super::EvalReport;

pub fn reports_to_json(reports: &[EvalReport]) -> String {
    let mut s = serde_json::to_string_pretty(reports).expect("reports serialize");
    s.push('\n');
    s
}

/// Markdown table: one row per dataset, one column per classifier, cells
/// `mean ± std` in percent. Rows and columns keep first-appearance order.
pub fn render_table(reports: &[EvalReport]) -> String {
    let mut datasets: Vec<&str> = Vec::new();
    let mut classifiers: Vec<&str> = Vec::new();
    for r in reports {
        if !datasets.contains(&r.dataset.as_str()) {
            datasets.push(&r.dataset);
        }
        if !classifiers.contains(&r.classifier.as_str()) {
            classifiers.push(&r.classifier);
        }
    }

    let mut rows: Vec<Vec<String>> = vec![std::iter::once("Dataset")
        .chain(classifiers.iter().copied())
        .map(str::to_owned)
        .collect()];
    for d in &datasets {
        let mut row = vec![d.to_string()];
        for c in &classifiers {
            let cell = reports
                .iter()
                .find(|r| r.dataset == *d && r.classifier == *c)
                .map_or_else(|| "-".to_owned(), |r| format!("{:.2} ± {:.2}", r.mean_ca, r.std_ca));
            row.push(cell);
        }
        rows.push(row);
    }

    let widths: Vec<usize> = (0..rows[0].len())
        .map(|j| rows.iter().map(|r| r[j].chars().count()).max().unwrap_or(0))
        .collect();
    let fmt_row = |row: &[String]| {
        let cells: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(c, &w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
            .collect();
        format!("| {} |\n", cells.join(" | "))
    };
    let mut out = fmt_row(&rows[0]);
    let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
    out.push_str(&format!("|-{}-|\n", rule.join("-|-")));
    for row in &rows[1..] {
        out.push_str(&fmt_row(row));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rep(dataset: &str, classifier: &str, mean: f64, std: f64) -> EvalReport {
        EvalReport {
            classifier: classifier.into(),
            dataset: dataset.into(),
            selected_k: 1,
            selected_r: None,
            ca_values: vec![mean; 2],
            mean_ca: mean,
            std_ca: std,
            seed: 42,
        }
    }

    #[test]
    fn table_layout() {
        let t = render_table(&[
            rep("WINE", "NNC", 94.871, 2.5),
            rep("WINE", "Gwk-NNC", 97.44, 1.8),
            rep("PENDIGITS", "NNC", 96.08, 0.33),
        ]);
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[0].starts_with("| Dataset"));
        assert!(lines[2].contains("94.87 ± 2.50") && lines[2].contains("97.44 ± 1.80"));
        assert!(lines[3].contains("96.08 ± 0.33") && lines[3].contains(" - "));
    }

    #[test]
    fn json_is_a_list() {
        let v: serde_json::Value = serde_json::from_str(&reports_to_json(&[rep("W", "NNC", 90.0, 1.0)])).unwrap();
        assert_eq!(v[0]["classifier"], "NNC");
        assert_eq!(v[0]["selected_r"], serde_json::Value::Null);
    }
}
