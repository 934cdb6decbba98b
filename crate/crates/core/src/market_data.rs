//! Price ingestion, volume-rolled continuous futures, and sampled log returns.
//!
//! Input CSV layouts (header row required, ISO-8601 dates):
//!
//! ```text
//! date,contract_id,price,volume     # futures, one row per contract per day
//! date,price                        # spot
//! ```
//!
//! Weekly sampling keeps the last observation of each ISO week, monthly the last
//! observation of each calendar month. When the active futures contract changes
//! between two sampled dates the return is measured inside the incoming contract,
//! from its own quote at or before the previous sampled date. Only when the
//! incoming contract has no such quote does the return span both contracts.

use std::collections::HashMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frequency {
    Weekly,
    Monthly,
}

impl Frequency {
    pub fn periods_per_year(self) -> usize {
        match self {
            Frequency::Weekly => 52,
            Frequency::Monthly => 12,
        }
    }

    fn bucket(self, date: NaiveDate) -> (i32, u32) {
        match self {
            Frequency::Weekly => {
                let w = date.iso_week();
                (w.year(), w.week())
            }
            Frequency::Monthly => (date.year(), date.month()),
        }
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Frequency::Weekly => "weekly",
            Frequency::Monthly => "monthly",
        })
    }
}

impl FromStr for Frequency {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "weekly" => Ok(Frequency::Weekly),
            "monthly" => Ok(Frequency::Monthly),
            other => Err(Error::validation(format!("unknown frequency '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PricePoint {
    pub date: NaiveDate,
    pub price: f64,
    /// Traded contracts on the day; absent for spot quotes.
    pub volume: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContractSeries {
    pub contract_id: String,
    pub points: Vec<PricePoint>,
}

impl ContractSeries {
    pub fn new(contract_id: impl Into<String>, points: Vec<PricePoint>) -> Result<Self> {
        let contract_id = contract_id.into();
        if points.is_empty() {
            return Err(Error::validation(format!(
                "contract {contract_id} has no points"
            )));
        }
        check_points(&points)?;
        Ok(Self {
            contract_id,
            points,
        })
    }

    fn last_date(&self) -> NaiveDate {
        self.points[self.points.len() - 1].date
    }

    /// Latest quote on or before `date`.
    fn price_at_or_before(&self, date: NaiveDate) -> Option<f64> {
        let idx = self.points.partition_point(|p| p.date <= date);
        (idx > 0).then(|| self.points[idx - 1].price)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Instrument {
    Spot,
    ContinuousFutures,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    pub instrument: Instrument,
    pub points: Vec<PricePoint>,
    /// Dates on which the active contract changed. Empty for spot.
    pub roll_dates: Vec<NaiveDate>,
    /// Index into `legs` of the contract active on each point (futures only).
    active: Vec<usize>,
    legs: Vec<ContractSeries>,
}

impl PriceSeries {
    pub fn spot(points: Vec<PricePoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::validation("spot series has no points"));
        }
        check_points(&points)?;
        Ok(Self {
            instrument: Instrument::Spot,
            points,
            roll_dates: Vec::new(),
            active: Vec::new(),
            legs: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Contract label active on each point, `None` for spot.
    pub fn active_contract(&self, i: usize) -> Option<&str> {
        self.active
            .get(i)
            .map(|&leg| self.legs[leg].contract_id.as_str())
    }
}

fn check_points(points: &[PricePoint]) -> Result<()> {
    for p in points {
        if !(p.price.is_finite() && p.price > 0.0) {
            return Err(Error::validation(format!(
                "non-positive price {} on {}",
                p.price, p.date
            )));
        }
    }
    if let Some(w) = points.windows(2).find(|w| w[1].date <= w[0].date) {
        return Err(Error::validation(format!(
            "dates not strictly increasing at {}",
            w[1].date
        )));
    }
    Ok(())
}

/// Dated log returns sampled at a fixed frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnSeries {
    pub frequency: Frequency,
    dates: Vec<NaiveDate>,
    values: Vec<f64>,
}

impl ReturnSeries {
    pub fn new(frequency: Frequency, dates: Vec<NaiveDate>, values: Vec<f64>) -> Result<Self> {
        if dates.len() != values.len() {
            return Err(Error::validation(format!(
                "{} dates but {} values",
                dates.len(),
                values.len()
            )));
        }
        if let Some(w) = dates.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::validation(format!(
                "return dates not strictly increasing at {}",
                w[1]
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::validation(format!("non-finite return {v}")));
        }
        Ok(Self {
            frequency,
            dates,
            values,
        })
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Sub-series over `range` (indices).
    pub fn slice(&self, range: std::ops::Range<usize>) -> ReturnSeries {
        ReturnSeries {
            frequency: self.frequency,
            dates: self.dates[range.clone()].to_vec(),
            values: self.values[range].to_vec(),
        }
    }

    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> ReturnSeries {
        ReturnSeries {
            frequency: self.frequency,
            dates: self.dates.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (NaiveDate, f64)> + '_ {
        self.dates.iter().copied().zip(self.values.iter().copied())
    }
}

/// Parsed content of one price file.
#[derive(Debug, Clone, PartialEq)]
pub enum LoadedPrices {
    Spot(PriceSeries),
    Futures(Vec<ContractSeries>),
}

const FUTURES_HEADER: [&str; 4] = ["date", "contract_id", "price", "volume"];
const SPOT_HEADER: [&str; 2] = ["date", "price"];

/// Read a spot or futures price file. The layout is chosen by the header row.
pub fn load_prices<R: Read>(source: R) -> Result<LoadedPrices> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(source);
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Parse {
            line: 1,
            msg: e.to_string(),
        })?
        .iter()
        .map(|h| h.to_ascii_lowercase())
        .collect();

    let futures = if header == FUTURES_HEADER {
        true
    } else if header == SPOT_HEADER {
        false
    } else {
        return Err(Error::Parse {
            line: 1,
            msg: format!(
                "expected header '{}' or '{}', found '{}'",
                FUTURES_HEADER.join(","),
                SPOT_HEADER.join(","),
                header.join(",")
            ),
        });
    };

    // contract id -> (line, point); first-appearance order kept in `order`
    let mut order: Vec<String> = Vec::new();
    let mut rows: HashMap<String, Vec<(u64, PricePoint)>> = HashMap::new();

    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map(|p| p.line()).unwrap_or(0),
            msg: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let field = |i: usize| record.get(i).unwrap_or("");
        let date = NaiveDate::parse_from_str(field(0), "%Y-%m-%d").map_err(|e| Error::Parse {
            line,
            msg: format!("bad date '{}': {e}", field(0)),
        })?;
        let (contract, price_field, volume) = if futures {
            let volume = field(3).parse::<u64>().map_err(|e| Error::Parse {
                line,
                msg: format!("bad volume '{}': {e}", field(3)),
            })?;
            (field(1).to_string(), field(2), Some(volume))
        } else {
            (String::new(), field(1), None)
        };
        let price = price_field.parse::<f64>().map_err(|e| Error::Parse {
            line,
            msg: format!("bad price '{price_field}': {e}"),
        })?;
        if !(price.is_finite() && price > 0.0) {
            return Err(Error::Validation {
                line: Some(line),
                msg: format!("price must be strictly positive, got '{price_field}'"),
            });
        }
        if futures && contract.is_empty() {
            return Err(Error::Validation {
                line: Some(line),
                msg: "empty contract_id".into(),
            });
        }
        if !rows.contains_key(&contract) {
            order.push(contract.clone());
        }
        rows.entry(contract).or_default().push((
            line,
            PricePoint {
                date,
                price,
                volume,
            },
        ));
    }

    if order.is_empty() {
        return Err(Error::validation("price file has no data rows"));
    }

    let mut series = Vec::with_capacity(order.len());
    for id in order {
        let mut pts = rows.remove(&id).unwrap_or_default();
        pts.sort_by_key(|(_, p)| p.date);
        if let Some(w) = pts.windows(2).find(|w| w[0].1.date == w[1].1.date) {
            return Err(Error::Validation {
                line: Some(w[1].0),
                msg: format!("duplicate date {} for '{}'", w[1].1.date, id),
            });
        }
        let points: Vec<PricePoint> = pts.into_iter().map(|(_, p)| p).collect();
        series.push((id, points));
    }

    if futures {
        series
            .into_iter()
            .map(|(id, points)| ContractSeries::new(id, points))
            .collect::<Result<Vec<_>>>()
            .map(LoadedPrices::Futures)
    } else {
        let (_, points) = series.pop().expect("one spot group");
        PriceSeries::spot(points).map(LoadedPrices::Spot)
    }
}

/// Build a continuous futures series by following the contract with the largest
/// volume. Contracts are ranked by expiry (last quoted date); once the series has
/// moved to a contract it never returns to one that expires earlier.
pub fn roll_by_volume(contracts: &[ContractSeries]) -> Result<PriceSeries> {
    if contracts.is_empty() {
        return Err(Error::validation("no contracts to roll"));
    }
    for c in contracts {
        if c.points.is_empty() {
            return Err(Error::validation(format!(
                "contract {} has no points",
                c.contract_id
            )));
        }
        check_points(&c.points)?;
    }

    let mut by_expiry: Vec<usize> = (0..contracts.len()).collect();
    by_expiry.sort_by(|&i, &j| {
        contracts[i]
            .last_date()
            .cmp(&contracts[j].last_date())
            .then_with(|| contracts[i].contract_id.cmp(&contracts[j].contract_id))
    });
    let mut rank = vec![0usize; contracts.len()];
    for (r, &i) in by_expiry.iter().enumerate() {
        rank[i] = r;
    }

    let mut dates: Vec<NaiveDate> = contracts
        .iter()
        .flat_map(|c| c.points.iter().map(|p| p.date))
        .collect();
    dates.sort_unstable();
    dates.dedup();

    // cursor per contract into its own points
    let mut cursor = vec![0usize; contracts.len()];
    let mut active: Option<usize> = None;
    let mut points = Vec::with_capacity(dates.len());
    let mut active_idx = Vec::with_capacity(dates.len());
    let mut roll_dates = Vec::new();

    for &date in &dates {
        let mut quoted: Vec<(usize, PricePoint)> = Vec::new();
        for (ci, c) in contracts.iter().enumerate() {
            if let Some(p) = c.points.get(cursor[ci]) {
                if p.date == date {
                    quoted.push((ci, *p));
                    cursor[ci] += 1;
                }
            }
        }
        let floor = active.map(|a| rank[a]).unwrap_or(0);
        let leader = quoted
            .iter()
            .filter(|(ci, _)| rank[*ci] >= floor)
            .max_by(|(ci, p), (cj, q)| {
                p.volume
                    .unwrap_or(0)
                    .cmp(&q.volume.unwrap_or(0))
                    // on equal volume prefer the nearer contract
                    .then_with(|| rank[*cj].cmp(&rank[*ci]))
            })
            .copied();
        let Some((leader_ci, leader_pt)) = leader else {
            return Err(Error::Coverage(date));
        };
        let current = active.and_then(|a| quoted.iter().find(|(ci, _)| *ci == a).copied());
        let (ci, pt) = match current {
            Some((a, p)) if p.volume.unwrap_or(0) >= leader_pt.volume.unwrap_or(0) => (a, p),
            _ => (leader_ci, leader_pt),
        };
        if let Some(prev) = active {
            if prev != ci {
                roll_dates.push(date);
            }
        }
        active = Some(ci);
        points.push(pt);
        active_idx.push(ci);
    }

    Ok(PriceSeries {
        instrument: Instrument::ContinuousFutures,
        points,
        roll_dates,
        active: active_idx,
        legs: contracts.to_vec(),
    })
}

/// Indices of the last observation in each sampling bucket.
fn sample_indices(points: &[PricePoint], frequency: Frequency) -> Vec<usize> {
    let mut out = Vec::new();
    for (i, p) in points.iter().enumerate() {
        let last_in_bucket = points.get(i + 1).map_or(true, |next| {
            frequency.bucket(next.date) != frequency.bucket(p.date)
        });
        if last_in_bucket {
            out.push(i);
        }
    }
    out
}

/// Log returns on the sampled grid.
pub fn to_returns(series: &PriceSeries, frequency: Frequency) -> Result<ReturnSeries> {
    let idx = sample_indices(&series.points, frequency);
    if idx.len() < 2 {
        return Err(Error::InsufficientData {
            what: "returns",
            needed: 2,
            got: idx.len(),
        });
    }
    let mut dates = Vec::with_capacity(idx.len() - 1);
    let mut values = Vec::with_capacity(idx.len() - 1);
    for w in idx.windows(2) {
        let (prev, cur) = (w[0], w[1]);
        let p_cur = series.points[cur].price;
        let mut p_prev = series.points[prev].price;
        if let (Some(&a_prev), Some(&a_cur)) = (series.active.get(prev), series.active.get(cur)) {
            if a_prev != a_cur {
                // splice inside the incoming contract when it has an earlier quote
                if let Some(back) = series.legs[a_cur].price_at_or_before(series.points[prev].date)
                {
                    p_prev = back;
                }
            }
        }
        dates.push(series.points[cur].date);
        values.push(p_cur.ln() - p_prev.ln());
    }
    ReturnSeries::new(frequency, dates, values)
}

/// Restrict two return series to their common dates.
pub fn align(spot: &ReturnSeries, futures: &ReturnSeries) -> Result<(ReturnSeries, ReturnSeries)> {
    if spot.frequency != futures.frequency {
        return Err(Error::Alignment(format!(
            "frequency mismatch: {} vs {}",
            spot.frequency, futures.frequency
        )));
    }
    let (mut i, mut j) = (0, 0);
    let (mut dates, mut sv, mut fv) = (Vec::new(), Vec::new(), Vec::new());
    while i < spot.len() && j < futures.len() {
        match spot.dates[i].cmp(&futures.dates[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                dates.push(spot.dates[i]);
                sv.push(spot.values[i]);
                fv.push(futures.values[j]);
                i += 1;
                j += 1;
            }
        }
    }
    if dates.is_empty() {
        return Err(Error::Alignment("no common dates".into()));
    }
    Ok((
        ReturnSeries::new(spot.frequency, dates.clone(), sv)?,
        ReturnSeries::new(futures.frequency, dates, fv)?,
    ))
}

/// True when both series cover exactly the same dates.
pub fn same_dates(a: &ReturnSeries, b: &ReturnSeries) -> bool {
    a.frequency == b.frequency && a.dates == b.dates
}

pub fn write_spot_csv<W: Write>(out: W, points: &[PricePoint]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SPOT_HEADER).map_err(csv_io)?;
    for p in points {
        w.write_record([p.date.to_string(), p.price.to_string()])
            .map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_futures_csv<W: Write>(out: W, contracts: &[ContractSeries]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(FUTURES_HEADER).map_err(csv_io)?;
    for c in contracts {
        for p in &c.points {
            w.write_record([
                p.date.to_string(),
                c.contract_id.clone(),
                p.price.to_string(),
                p.volume.unwrap_or(0).to_string(),
            ])
            .map_err(csv_io)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Continuous series with the active contract per row.
pub fn write_continuous_csv<W: Write>(out: W, series: &PriceSeries) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["date", "price", "contract_id", "rolled"])
        .map_err(csv_io)?;
    for (i, p) in series.points.iter().enumerate() {
        let rolled = series.roll_dates.binary_search(&p.date).is_ok();
        w.write_record([
            p.date.to_string(),
            p.price.to_string(),
            series.active_contract(i).unwrap_or("").to_string(),
            (rolled as u8).to_string(),
        ])
        .map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_returns_csv<W: Write>(out: W, series: &ReturnSeries) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["date", "log_return"]).map_err(csv_io)?;
    for (d, v) in series.iter() {
        w.write_record([d.to_string(), v.to_string()])
            .map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn csv_io(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> NaiveDate {
        NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
    }

    fn pt(date: &str, price: f64, volume: u64) -> PricePoint {
        PricePoint {
            date: d(date),
            price,
            volume: Some(volume),
        }
    }

    #[test]
    fn parses_three_row_futures_file() {
        let csv = "date,contract_id,price,volume\n\
                   2020-01-06,HU1,1.50,100\n\
                   2020-01-07,HU1,1.52,120\n\
                   2020-01-08,HU1,1.49,90\n";
        let LoadedPrices::Futures(c) = load_prices(csv.as_bytes()).unwrap() else {
            panic!("expected futures");
        };
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].points.len(), 3);
        assert_eq!(c[0].points[2].volume, Some(90));
    }

    #[test]
    fn zero_price_is_rejected_with_line() {
        let csv = "date,price\n2020-01-06,1.5\n2020-01-07,0.0\n";
        match load_prices(csv.as_bytes()) {
            Err(Error::Validation { line: Some(3), .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_row_reports_line() {
        let csv = "date,price\n2020-01-06,1.5\n2020-13-07,1.6\n";
        match load_prices(csv.as_bytes()) {
            Err(Error::Parse { line: 3, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_dates_rejected() {
        let csv = "date,price\n2020-01-07,1.5\n2020-01-06,1.6\n2020-01-07,1.7\n";
        assert!(matches!(
            load_prices(csv.as_bytes()),
            Err(Error::Validation { line: Some(_), .. })
        ));
    }

    #[test]
    fn wrong_header_is_parse_error() {
        let csv = "when,price\n2020-01-06,1.5\n";
        assert!(matches!(
            load_prices(csv.as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn single_contract_rolls_to_itself() {
        let c = ContractSeries::new(
            "A",
            vec![pt("2020-01-06", 10.0, 5), pt("2020-01-07", 11.0, 6)],
        )
        .unwrap();
        let s = roll_by_volume(std::slice::from_ref(&c)).unwrap();
        assert_eq!(s.points, c.points);
        assert!(s.roll_dates.is_empty());
    }

    #[test]
    fn gap_with_only_abandoned_contract_is_coverage_error() {
        let a = ContractSeries::new(
            "A",
            vec![
                pt("2020-01-06", 10.0, 5),
                pt("2020-01-07", 10.0, 1),
                pt("2020-01-09", 10.0, 1),
            ],
        )
        .unwrap();
        let b = ContractSeries::new(
            "B",
            vec![
                pt("2020-01-07", 10.0, 9),
                pt("2020-01-08", 10.0, 9),
                pt("2020-01-10", 10.0, 9),
            ],
        )
        .unwrap();
        // B is active from 01-07, A alone on 01-09 cannot take over
        assert!(matches!(
            roll_by_volume(&[a, b]),
            Err(Error::Coverage(date)) if date == d("2020-01-09")
        ));
    }

    #[test]
    fn monthly_sampling_takes_last_of_month() {
        let pts = vec![
            PricePoint {
                date: d("2020-01-30"),
                price: 1.0,
                volume: None,
            },
            PricePoint {
                date: d("2020-01-31"),
                price: 2.0,
                volume: None,
            },
            PricePoint {
                date: d("2020-02-03"),
                price: 3.0,
                volume: None,
            },
            PricePoint {
                date: d("2020-02-28"),
                price: 4.0,
                volume: None,
            },
        ];
        let s = PriceSeries::spot(pts).unwrap();
        let r = to_returns(&s, Frequency::Monthly).unwrap();
        assert_eq!(r.dates(), &[d("2020-02-28")]);
        assert!((r.values()[0] - 2.0f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn weekly_sampling_uses_iso_weeks() {
        // 2020-12-31 (Thu) and 2021-01-03 (Sun) share ISO week 2020-W53
        let pts = vec![
            PricePoint {
                date: d("2020-12-24"),
                price: 1.0,
                volume: None,
            },
            PricePoint {
                date: d("2020-12-31"),
                price: 2.0,
                volume: None,
            },
            PricePoint {
                date: d("2021-01-03"),
                price: 4.0,
                volume: None,
            },
            PricePoint {
                date: d("2021-01-04"),
                price: 8.0,
                volume: None,
            },
        ];
        let s = PriceSeries::spot(pts).unwrap();
        let r = to_returns(&s, Frequency::Weekly).unwrap();
        assert_eq!(r.dates(), &[d("2021-01-03"), d("2021-01-04")]);
        assert!((r.values()[0] - 4.0f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn single_sample_is_insufficient() {
        let s = PriceSeries::spot(vec![PricePoint {
            date: d("2020-01-06"),
            price: 1.0,
            volume: None,
        }])
        .unwrap();
        assert!(matches!(
            to_returns(&s, Frequency::Weekly),
            Err(Error::InsufficientData { .. })
        ));
    }

    #[test]
    fn align_drops_unmatched_and_rejects_disjoint() {
        let a = ReturnSeries::new(
            Frequency::Weekly,
            vec![d("2020-01-06"), d("2020-01-13"), d("2020-01-20")],
            vec![0.1, 0.2, 0.3],
        )
        .unwrap();
        let b = ReturnSeries::new(
            Frequency::Weekly,
            vec![d("2020-01-06"), d("2020-01-20")],
            vec![1.0, 3.0],
        )
        .unwrap();
        let (x, y) = align(&a, &b).unwrap();
        assert_eq!(x.values(), &[0.1, 0.3]);
        assert_eq!(y.values(), &[1.0, 3.0]);
        assert_eq!(x.dates(), y.dates());

        let (x, y) = align(&a, &a).unwrap();
        assert_eq!(x, a);
        assert_eq!(y, a);

        let c = ReturnSeries::new(Frequency::Weekly, vec![d("2021-01-04")], vec![0.0]).unwrap();
        assert!(matches!(align(&a, &c), Err(Error::Alignment(_))));
    }
}
