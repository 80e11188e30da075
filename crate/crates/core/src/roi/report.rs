use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::layout::{ElectrodeLayout, Hemisphere, Region};
use crate::error::{Error, Result};
use crate::features::FeatureColumn;
use crate::relieff::WeightVector;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Attribution {
    pub count: usize,
    pub weight_sum: f64,
}

impl Attribution {
    fn add(&mut self, other: Attribution) {
        self.count += other.count;
        self.weight_sum += other.weight_sum;
    }
}

/// Per-electrode count of selected features and the sum of their weights,
/// accumulated in feature index order.
pub fn attribute_selection(
    selected: &[usize],
    columns: &[FeatureColumn],
    weights: &WeightVector,
) -> Result<BTreeMap<String, Attribution>> {
    if weights.len() != columns.len() {
        return Err(Error::Shape(format!(
            "{} weights for {} columns",
            weights.len(),
            columns.len()
        )));
    }
    let mut order = selected.to_vec();
    order.sort_unstable();
    let mut out: BTreeMap<String, Attribution> = BTreeMap::new();
    for i in order {
        let col = columns
            .get(i)
            .ok_or_else(|| Error::Parameter(format!("selected index {i} outside {} features", columns.len())))?;
        out.entry(col.electrode.clone()).or_default().add(Attribution {
            count: 1,
            weight_sum: weights.weights[i],
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElectrodeRow {
    pub label: String,
    pub hemisphere: Hemisphere,
    pub region: Region,
    pub count: usize,
    pub weight_sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionCell {
    pub hemisphere: Hemisphere,
    pub region: Region,
    pub count: usize,
    pub weight_sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionReport {
    /// One row per layout electrode, in layout order.
    pub electrodes: Vec<ElectrodeRow>,
    /// Hemisphere × region totals, hemisphere-major.
    pub regions: Vec<RegionCell>,
    pub total_selected: usize,
    pub left_count: usize,
    pub right_count: usize,
    pub midline_count: usize,
    /// `(L - R) / (L + R)` over selection counts; 0 when both are 0.
    pub asymmetry_index: f64,
    /// The same ratio over weight sums.
    pub weighted_asymmetry: f64,
}

pub fn asymmetry(left: f64, right: f64) -> f64 {
    if left + right == 0.0 {
        0.0
    } else {
        ((left - right) / (left + right)).clamp(-1.0, 1.0)
    }
}

pub fn aggregate_regions(
    per_electrode: &BTreeMap<String, Attribution>,
    layout: &ElectrodeLayout,
) -> Result<RegionReport> {
    if let Some(unknown) = per_electrode.keys().find(|k| layout.get(k).is_none()) {
        return Err(Error::Config(format!("electrode {unknown} is not in the layout")));
    }
    let electrodes: Vec<ElectrodeRow> = layout
        .electrodes
        .iter()
        .map(|e| {
            let a = per_electrode.get(&e.label).copied().unwrap_or_default();
            ElectrodeRow {
                label: e.label.clone(),
                hemisphere: e.hemisphere,
                region: e.region,
                count: a.count,
                weight_sum: a.weight_sum,
            }
        })
        .collect();
    let mut cells: BTreeMap<(Hemisphere, Region), Attribution> = BTreeMap::new();
    for h in Hemisphere::ALL {
        for r in Region::ALL {
            cells.insert((h, r), Attribution::default());
        }
    }
    // Sum in label order so the result does not depend on layout ordering.
    for (label, a) in per_electrode {
        let e = layout.get(label).expect("checked above");
        cells
            .get_mut(&(e.hemisphere, e.region))
            .expect("all cells present")
            .add(*a);
    }
    let side = |h: Hemisphere| {
        Region::ALL.iter().fold(Attribution::default(), |mut acc, r| {
            acc.add(cells[&(h, *r)]);
            acc
        })
    };
    let (left, right, mid) = (
        side(Hemisphere::Left),
        side(Hemisphere::Right),
        side(Hemisphere::Midline),
    );
    Ok(RegionReport {
        electrodes,
        regions: cells
            .into_iter()
            .map(|((hemisphere, region), a)| RegionCell {
                hemisphere,
                region,
                count: a.count,
                weight_sum: a.weight_sum,
            })
            .collect(),
        total_selected: left.count + right.count + mid.count,
        left_count: left.count,
        right_count: right.count,
        midline_count: mid.count,
        asymmetry_index: asymmetry(left.count as f64, right.count as f64),
        weighted_asymmetry: asymmetry(left.weight_sum, right.weight_sum),
    })
}

impl RegionReport {
    /// Fraction of the selected features sitting on `labels`.
    pub fn fraction_on(&self, labels: &[&str]) -> f64 {
        if self.total_selected == 0 {
            return 0.0;
        }
        let n: usize = self
            .electrodes
            .iter()
            .filter(|e| labels.contains(&e.label.as_str()))
            .map(|e| e.count)
            .sum();
        n as f64 / self.total_selected as f64
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "Region-of-interest report").unwrap();
        writeln!(
            out,
            "selected features attributed to electrodes: {}",
            self.total_selected
        )
        .unwrap();
        writeln!(
            out,
            "left: {}  right: {}  midline: {}",
            self.left_count, self.right_count, self.midline_count
        )
        .unwrap();
        writeln!(out, "asymmetry index (counts): {:.4}", self.asymmetry_index).unwrap();
        writeln!(out, "asymmetry index (weights): {:.4}", self.weighted_asymmetry).unwrap();
        writeln!(out).unwrap();
        writeln!(
            out,
            "{:<20}{:<11}{:>7}{:>14}",
            "hemisphere", "region", "count", "weight_sum"
        )
        .unwrap();
        for c in &self.regions {
            writeln!(
                out,
                "{:<20}{:<11}{:>7}{:>14.6}",
                c.hemisphere.as_str(),
                c.region.as_str(),
                c.count,
                c.weight_sum
            )
            .unwrap();
        }
        writeln!(out).unwrap();
        writeln!(
            out,
            "{:<8}{:<10}{:<11}{:>7}{:>14}",
            "label", "hemi", "region", "count", "weight_sum"
        )
        .unwrap();
        let mut rows: Vec<&ElectrodeRow> = self.electrodes.iter().filter(|e| e.count > 0).collect();
        rows.sort_by(|a, b| b.count.cmp(&a.count).then(a.label.cmp(&b.label)));
        for e in rows {
            writeln!(
                out,
                "{:<8}{:<10}{:<11}{:>7}{:>14.6}",
                e.label,
                e.hemisphere.as_str(),
                e.region.as_str(),
                e.count,
                e.weight_sum
            )
            .unwrap();
        }
        out
    }
}

/// Head outline with one circle per electrode; fill darkens with the selection
/// count and selected electrodes get a red outline.
pub fn scalp_map_svg(report: &RegionReport, layout: &ElectrodeLayout) -> String {
    const SIZE: f64 = 400.0;
    const R: f64 = 170.0;
    let c = SIZE / 2.0;
    let max = report.electrodes.iter().map(|e| e.count).max().unwrap_or(0).max(1);
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#).unwrap();
    writeln!(
        s,
        r#"<circle cx="{c}" cy="{c}" r="{R}" fill="none" stroke="black" stroke-width="2"/>"#
    )
    .unwrap();
    writeln!(
        s,
        r#"<polyline points="{:.1},{:.1} {:.1},{:.1} {:.1},{:.1}" fill="none" stroke="black" stroke-width="2"/>"#,
        c - 15.0,
        c - R + 2.0,
        c,
        c - R - 18.0,
        c + 15.0,
        c - R + 2.0
    )
    .unwrap();
    for e in &report.electrodes {
        let Some(pos) = layout.get(&e.label) else { continue };
        let (x, y) = (c + pos.x * R, c - pos.y * R);
        let shade = 255 - (200 * e.count / max) as u8;
        let (stroke, width) = if e.count > 0 { ("red", 2.5) } else { ("gray", 1.0) };
        writeln!(
            s,
            r##"<circle cx="{x:.2}" cy="{y:.2}" r="9" fill="#ff{shade:02x}{shade:02x}" stroke="{stroke}" stroke-width="{width}" data-label="{}" data-count="{}"/>"##,
            e.label, e.count
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" font-size="6" text-anchor="middle" font-family="sans-serif">{}</text>"#,
            y + 2.0,
            e.label
        )
        .unwrap();
    }
    writeln!(
        s,
        r#"<text x="10" y="{:.0}" font-size="11" font-family="sans-serif">asymmetry index {:.3} (L {} / R {})</text>"#,
        SIZE - 10.0,
        report.asymmetry_index,
        report.left_count,
        report.right_count
    )
    .unwrap();
    s.push_str("</svg>\n");
    s
}

pub fn render_scalp_map(report: &RegionReport, layout: &ElectrodeLayout, out_path: &Path) -> Result<()> {
    crate::signal::io::write_file(out_path, scalp_map_svg(report, layout).as_bytes())
}
