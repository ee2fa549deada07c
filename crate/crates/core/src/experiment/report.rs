use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::GridResult;
use crate::error::{Error, Result};
use crate::stats::paired_t_greater;

/// Best (config, rate) cell of a dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WinnerReport {
    pub dataset: String,
    pub best_config: String,
    pub best_br: f64,
    pub mean_accuracy: f64,
    /// Largest p-value of the one-sided paired tests against every cell on
    /// the other side of BR = 1; `None` until computed.
    pub max_p_value: Option<f64>,
    /// Another cell reached exactly the same mean accuracy.
    #[serde(default)]
    pub tie: bool,
}

impl WinnerReport {
    pub fn prefers_high_rate(&self) -> bool {
        self.best_br > 1.0
    }
}

fn best_cell(gr: &GridResult, configs: &[usize]) -> Option<(usize, usize, f64, bool)> {
    let mut best: Option<(usize, usize, f64)> = None;
    let mut tie = false;
    // rates outermost so exact ties resolve to the lower rate, then the
    // earlier config
    for b in 0..gr.n_rates() {
        for &c in configs {
            let m = gr.mean(c, b);
            match best {
                Some((_, _, bm)) if m == bm => tie = true,
                Some((_, _, bm)) if m < bm => {}
                _ => {
                    best = Some((c, b, m));
                    tie = false;
                }
            }
        }
    }
    best.map(|(c, b, m)| (c, b, m, tie))
}

/// Cell with the highest mean accuracy (p-value not yet filled in).
pub fn select_winner(gr: &GridResult) -> WinnerReport {
    let all: Vec<usize> = (0..gr.n_configs()).collect();
    let (c, b, m, tie) = best_cell(gr, &all).expect("grid has at least one cell");
    WinnerReport {
        dataset: gr.dataset.clone(),
        best_config: gr.config_names[c].clone(),
        best_br: gr.br_values[b],
        mean_accuracy: m,
        max_p_value: None,
        tie,
    }
}

/// Maximum p-value of `paired_t_greater(winner, other)` over every cell
/// whose rate lies on the other side of 1 from the winner's rate.
pub fn significance_analysis(gr: &GridResult, winner: &WinnerReport) -> Result<f64> {
    let c = gr
        .config_index(&winner.best_config)
        .ok_or_else(|| Error::invalid(format!("config `{}` not in grid", winner.best_config)))?;
    let b = gr
        .rate_index(winner.best_br)
        .ok_or_else(|| Error::invalid(format!("rate {} not in grid", winner.best_br)))?;
    let high = winner.best_br > 1.0;
    let winner_cells = gr.cell(c, b);
    let mut max_p: Option<f64> = None;
    for (ob, &br) in gr.br_values.iter().enumerate() {
        if (br > 1.0) == high {
            continue;
        }
        for oc in 0..gr.n_configs() {
            let p = paired_t_greater(winner_cells, gr.cell(oc, ob))?.p_value;
            max_p = Some(max_p.map_or(p, |m: f64| m.max(p)));
        }
    }
    max_p.ok_or_else(|| {
        Error::invalid(format!(
            "grid for `{}` has no rates on the other side of 1 from {}",
            gr.dataset, winner.best_br
        ))
    })
}

/// Winner plus its significance.
pub fn analyze(gr: &GridResult) -> Result<WinnerReport> {
    let mut w = select_winner(gr);
    w.max_p_value = Some(significance_analysis(gr, &w)?);
    Ok(w)
}

/// Best rate for each configuration considered on its own.
pub fn per_config_winners(gr: &GridResult) -> Vec<WinnerReport> {
    (0..gr.n_configs())
        .map(|c| {
            let (_, b, m, tie) = best_cell(gr, &[c]).expect("grid has at least one rate");
            WinnerReport {
                dataset: gr.dataset.clone(),
                best_config: gr.config_names[c].clone(),
                best_br: gr.br_values[b],
                mean_accuracy: m,
                max_p_value: None,
                tie,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrCurve {
    pub dataset: String,
    pub config: String,
    /// (rate, mean accuracy) in grid order.
    pub points: Vec<(f64, f64)>,
}

pub fn br_curves(gr: &GridResult) -> Vec<BrCurve> {
    (0..gr.n_configs())
        .map(|c| BrCurve {
            dataset: gr.dataset.clone(),
            config: gr.config_names[c].clone(),
            points: gr
                .br_values
                .iter()
                .enumerate()
                .map(|(b, &br)| (br, gr.mean(c, b)))
                .collect(),
        })
        .collect()
}

/// How often each rate of `br_grid` is a winning rate. With `config` set,
/// only reports for that configuration are counted.
pub fn winning_br_histogram(reports: &[WinnerReport], config: Option<&str>, br_grid: &[f64]) -> Vec<(f64, usize)> {
    br_grid
        .iter()
        .map(|&br| {
            let n = reports
                .iter()
                .filter(|r| config.is_none_or(|c| r.best_config == c))
                .filter(|r| r.best_br == br)
                .count();
            (br, n)
        })
        .collect()
}

pub fn format_winners_table(reports: &[WinnerReport]) -> String {
    let name_w = reports.iter().map(|r| r.dataset.len()).max().unwrap_or(0).max(7);
    let cfg_w = reports.iter().map(|r| r.best_config.len()).max().unwrap_or(0).max(6);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<name_w$}  {:<cfg_w$}  {:>8}  {:>4}  {:>10}",
        "dataset", "config", "acc %", "br", "max p"
    );
    for r in reports {
        let p = match r.max_p_value {
            Some(p) if p < 1e-6 => "<1e-6".to_owned(),
            Some(p) => format!("{p:.6}"),
            None => "-".to_owned(),
        };
        let _ = writeln!(
            out,
            "{:<name_w$}  {:<cfg_w$}  {:>8.3}  {:>4}  {:>10}{}",
            r.dataset,
            r.best_config,
            100.0 * r.mean_accuracy,
            r.best_br,
            p,
            if r.tie { "  (tie)" } else { "" }
        );
    }
    out
}

pub fn format_histogram(hist: &[(f64, usize)]) -> String {
    let mut out = String::new();
    for &(br, n) in hist {
        let _ = writeln!(out, "{br:>4}  {n:>3}  {}", "#".repeat(n));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// One accuracy vector per (config, rate); `cells[c][b]`.
    fn grid(cells: Vec<Vec<Vec<f64>>>, brs: &[f64]) -> GridResult {
        let repeats = cells[0][0].len() / 2;
        let names = (0..cells.len()).map(|c| format!("c{c}")).collect();
        GridResult::new("toy", names, brs.to_vec(), repeats, cells.into_iter().flatten().flatten().collect()).unwrap()
    }

    fn constant(v: f64) -> Vec<f64> {
        vec![v; 4]
    }

    #[test]
    fn single_cell_wins() {
        let gr = grid(vec![vec![vec![0.5, 0.7]]], &[1.0]);
        let w = select_winner(&gr);
        assert_eq!((w.best_config.as_str(), w.best_br, w.mean_accuracy), ("c0", 1.0, 0.6));
        assert!(!w.tie);
    }

    #[test]
    fn ties_prefer_lower_rate() {
        // means [[0.7, 0.8], [0.8, 0.75]] over rates [0.5, 2.0]
        let gr = grid(
            vec![
                vec![constant(0.7), constant(0.8)],
                vec![constant(0.8), constant(0.75)],
            ],
            &[0.5, 2.0],
        );
        let w = select_winner(&gr);
        assert_eq!((w.best_config.as_str(), w.best_br), ("c1", 0.5));
        assert!(w.tie);
    }

    #[test]
    fn ties_at_same_rate_prefer_earlier_config() {
        let gr = grid(vec![vec![constant(0.9)], vec![constant(0.9)]], &[1.0]);
        assert_eq!(select_winner(&gr).best_config, "c0");
    }

    #[test]
    fn identical_opposite_cells_give_half() {
        let v = vec![0.8, 0.9, 0.7, 0.85];
        let gr = grid(vec![vec![v.clone(), v.clone()], vec![v.clone(), v]], &[0.4, 3.0]);
        let w = analyze(&gr).unwrap();
        assert_eq!(w.max_p_value, Some(0.5));
    }

    #[test]
    fn constant_domination_gives_zero() {
        let win = vec![0.9, 0.8, 0.95, 0.85];
        let lose: Vec<f64> = win.iter().map(|v| v - 0.1).collect();
        let gr = grid(vec![vec![lose.clone(), win], vec![lose.clone(), lose]], &[1.0, 2.0]);
        let w = analyze(&gr).unwrap();
        assert_eq!(w.best_br, 2.0);
        assert_eq!(w.max_p_value, Some(0.0));
    }

    #[test]
    fn one_sided_grid_has_no_significance() {
        let gr = grid(vec![vec![constant(0.5), constant(0.6)]], &[0.2, 0.4]);
        assert!(analyze(&gr).is_err());
    }

    #[test]
    fn curves_average_cells() {
        let gr = grid(vec![vec![vec![0.5, 0.7], vec![0.6, 0.6]]], &[0.2, 2.0]);
        let curves = br_curves(&gr);
        assert_eq!(curves.len(), 1);
        assert_eq!(curves[0].points.len(), 2);
        assert!((curves[0].points[0].1 - 0.6).abs() < 1e-15);
    }

    #[test]
    fn monotone_fixture_gives_monotone_curve() {
        let brs = [0.2, 0.6, 1.0, 3.0, 5.0];
        let cells = vec![brs.iter().enumerate().map(|(i, _)| constant(0.5 + 0.05 * i as f64)).collect()];
        let curve = &br_curves(&grid(cells, &brs))[0];
        assert!(curve.points.windows(2).all(|w| w[1].1 > w[0].1));
    }

    #[test]
    fn histogram_counts_rates() {
        let mk = |br: f64, cfg: &str| WinnerReport {
            dataset: "d".into(),
            best_config: cfg.into(),
            best_br: br,
            mean_accuracy: 0.5,
            max_p_value: None,
            tie: false,
        };
        let reports = [mk(0.2, "a"), mk(0.2, "b"), mk(5.0, "a")];
        let grid = [0.2, 1.0, 5.0];
        assert_eq!(winning_br_histogram(&reports, None, &grid), vec![(0.2, 2), (1.0, 0), (5.0, 1)]);
        assert_eq!(winning_br_histogram(&reports, Some("a"), &grid), vec![(0.2, 1), (1.0, 0), (5.0, 1)]);
        assert!(winning_br_histogram(&reports, Some("zzz"), &grid).iter().all(|&(_, n)| n == 0));
        assert!(!reports[0].prefers_high_rate());
        assert!(reports[2].prefers_high_rate());
    }

    #[test]
    fn table_renders_one_line_per_report() {
        let gr = grid(vec![vec![constant(0.5), constant(0.6)]], &[1.0, 2.0]);
        let w = analyze(&gr).unwrap();
        let text = format_winners_table(&[w.clone(), w]);
        assert_eq!(text.lines().count(), 3);
        assert!(text.contains("60.000"));
        assert!(text.contains("<1e-6"));
    }

    fn toy_grid() -> impl Strategy<Value = GridResult> {
        (1usize..4, 1usize..4, 1usize..4).prop_flat_map(|(nc, nb_lo, nb_hi)| {
            let nb = nb_lo + nb_hi;
            prop::collection::vec(0u8..=4, nc * nb * 4).prop_map(move |v| {
                let brs: Vec<f64> = (0..nb_lo)
                    .map(|i| 0.2 * (i + 1) as f64)
                    .chain((0..nb_hi).map(|i| 2.0 + i as f64))
                    .collect();
                let names = (0..nc).map(|c| format!("c{c}")).collect();
                GridResult::new("toy", names, brs, 2, v.iter().map(|&k| f64::from(k) / 4.0).collect()).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn winner_matches_brute_force_rescan(gr in toy_grid()) {
            // brute force: every cell with its mean, sorted by (-mean, br, config)
            let mut cells = Vec::new();
            for c in 0..gr.n_configs() {
                for b in 0..gr.n_rates() {
                    let v = gr.cell(c, b);
                    cells.push((v.iter().sum::<f64>() / v.len() as f64, b, c));
                }
            }
            cells.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
            let (m, b, c) = cells[0];
            let w = analyze(&gr).unwrap();
            prop_assert_eq!(&w.best_config, &gr.config_names[c]);
            prop_assert_eq!(w.best_br, gr.br_values[b]);
            prop_assert_eq!(w.mean_accuracy, m);
            prop_assert_eq!(w.tie, cells.len() > 1 && cells[1].0 == m);

            let mut max_p: f64 = 0.0;
            for ob in 0..gr.n_rates() {
                if (gr.br_values[ob] > 1.0) != (w.best_br > 1.0) {
                    for oc in 0..gr.n_configs() {
                        max_p = max_p.max(paired_t_greater(gr.cell(c, b), gr.cell(oc, ob)).unwrap().p_value);
                    }
                }
            }
            prop_assert_eq!(w.max_p_value, Some(max_p));
            prop_assert!((0.0..=1.0).contains(&max_p));
        }
    }
}
