//! Experiment records and their CSV/JSON encodings.
//!
//! Every command is a pure function of (scenario, flags, seed): rows are
//! buffered in deterministic order and floats are printed with six fixed
//! decimal places, so identical inputs produce byte-identical output.

use serde::Serialize;

use coalsim_core::auction::AuctionOutcome;
use coalsim_core::coalition::SearchEvent;
use coalsim_core::oracle::OracleReport;
use coalsim_core::Partition;

/// Canonical `{coalition}->cell;...` encoding of an allocation; parses back
/// losslessly via [`parse_allocation`].
pub fn allocation_string(outcome: &AuctionOutcome) -> String {
    outcome
        .allocation
        .iter()
        .map(|a| format!("{}->{}", a.coalition, a.cell_id))
        .collect::<Vec<_>>()
        .join(";")
}

/// Parse the encoding produced by [`allocation_string`].
pub fn parse_allocation(s: &str) -> coalsim_core::Result<Vec<(coalsim_core::Coalition, u32)>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(';')
        .map(|pair| {
            let (coal, cell) = pair.split_once("->").ok_or_else(|| {
                coalsim_core::Error::Parse(format!("allocation entry `{pair}` lacks `->`"))
            })?;
            Ok((
                coal.parse()?,
                cell.parse::<u32>()
                    .map_err(|e| coalsim_core::Error::Parse(format!("cell id `{cell}`: {e}")))?,
            ))
        })
        .collect()
}

/// One run or sweep point, flattened for CSV.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentRecord {
    pub experiment: String,
    pub seed: u64,
    pub swept_parameter: String,
    pub swept_value: Option<f64>,
    pub partition: String,
    pub allocation: String,
    pub total_profit: f64,
    pub num_coalitions: usize,
    pub max_coalition_size: usize,
}

impl ExperimentRecord {
    pub fn new(
        experiment: &str,
        seed: u64,
        partition: &Partition,
        outcome: &AuctionOutcome,
    ) -> ExperimentRecord {
        ExperimentRecord {
            experiment: experiment.to_string(),
            seed,
            swept_parameter: String::new(),
            swept_value: None,
            partition: partition.to_string(),
            allocation: allocation_string(outcome),
            total_profit: outcome.total_profit,
            num_coalitions: partition.len(),
            max_coalition_size: partition.max_coalition_size(),
        }
    }

    pub fn swept(mut self, parameter: &str, value: f64) -> ExperimentRecord {
        self.swept_parameter = parameter.to_string();
        self.swept_value = Some(value);
        self
    }
}

/// One allocated pair in a run report.
#[derive(Debug, Clone, Serialize)]
pub struct AllocationRow {
    pub coalition: String,
    pub cell: u32,
    pub revenue: f64,
    pub cost: f64,
    pub profit: f64,
    /// Informational task completion time: farthest-member travel plus the
    /// scheduled iterations' communication and compute time. Never feeds
    /// back into any allocation decision.
    pub completion_time_s: f64,
    pub schedule: Vec<(u32, u32)>,
}

/// One committed search move in a `--trace` report.
#[derive(Debug, Clone, Serialize)]
pub struct TraceRow {
    pub step: String,
    pub detail: String,
    pub partition: String,
    pub allocation: String,
    pub total_profit: f64,
}

impl TraceRow {
    pub fn from_event(event: &SearchEvent) -> TraceRow {
        match event {
            SearchEvent::Initial { partition, outcome } => TraceRow {
                step: "initial".into(),
                detail: String::new(),
                partition: partition.to_string(),
                allocation: allocation_string(outcome),
                total_profit: outcome.total_profit,
            },
            SearchEvent::Merge {
                first,
                second,
                after,
                gamma_after,
                ..
            } => TraceRow {
                step: "merge".into(),
                detail: format!("{first}+{second}"),
                partition: after.to_string(),
                allocation: String::new(),
                total_profit: *gamma_after,
            },
            SearchEvent::Split {
                coalition,
                after,
                gamma_after,
                ..
            } => TraceRow {
                step: "split".into(),
                detail: coalition.to_string(),
                partition: after.to_string(),
                allocation: String::new(),
                total_profit: *gamma_after,
            },
            SearchEvent::Final { partition, outcome } => TraceRow {
                step: "final".into(),
                detail: String::new(),
                partition: partition.to_string(),
                allocation: allocation_string(outcome),
                total_profit: outcome.total_profit,
            },
        }
    }
}

/// Oracle digest appended to a `--oracle` run.
#[derive(Debug, Clone, Serialize)]
pub struct OracleRow {
    pub best_partition: String,
    pub best_total_profit: f64,
    pub algorithm_total_profit: f64,
    pub optimality_gap: f64,
    pub stability_certified: bool,
    pub partitions_evaluated: u64,
}

impl From<&OracleReport> for OracleRow {
    fn from(r: &OracleReport) -> OracleRow {
        OracleRow {
            best_partition: r.best_partition.to_string(),
            best_total_profit: r.best_total_profit,
            algorithm_total_profit: r.algorithm_total_profit,
            optimality_gap: r.optimality_gap,
            stability_certified: r.stability_certified,
            partitions_evaluated: r.partitions_evaluated,
        }
    }
}

/// Full `run` output.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub record: ExperimentRecord,
    pub allocations: Vec<AllocationRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TraceRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleRow>,
}

/// One row of the preference/profit tables.
#[derive(Debug, Clone, Serialize)]
pub struct TableRow {
    pub table: String,
    pub coalition: String,
    pub cell: u32,
    pub value: f64,
    pub revenue: f64,
    pub cost: f64,
    pub profit: f64,
}

/// One (scheme, round) outcome of the comparison experiment.
#[derive(Debug, Clone, Serialize)]
pub struct CompareRow {
    pub round: u32,
    pub scheme: String,
    pub seed: u64,
    pub total_profit: f64,
    pub partition: String,
    pub allocation: String,
}

/// One draw of the communication-time experiment.
#[derive(Debug, Clone, Serialize)]
pub struct CommtimeRow {
    pub draw: u32,
    pub worker_time_s: f64,
    pub uav_time_s: f64,
}

// ---------------------------------------------------------------------------
// CSV encoding
// ---------------------------------------------------------------------------

fn csv_escape(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

fn f(x: f64) -> String {
    format!("{x:.6}")
}

/// Header shared by `run` and `sweep` CSV output.
pub const RUN_HEADER: &str = "experiment,seed,swept_parameter,swept_value,kind,detail,partition,allocation,total_profit,num_coalitions,max_coalition_size,coalition,cell,revenue,cost,profit,completion_time_s,optimality_gap,stability_certified,partitions_evaluated";

fn record_fields(r: &ExperimentRecord, kind: &str, detail: &str) -> Vec<String> {
    vec![
        csv_escape(&r.experiment),
        r.seed.to_string(),
        r.swept_parameter.clone(),
        r.swept_value.map(f).unwrap_or_default(),
        kind.to_string(),
        csv_escape(detail),
        csv_escape(&r.partition),
        csv_escape(&r.allocation),
        f(r.total_profit),
        r.num_coalitions.to_string(),
        r.max_coalition_size.to_string(),
    ]
}

fn pad(mut fields: Vec<String>, width: usize) -> String {
    fields.resize(width, String::new());
    fields.join(",")
}

const RUN_WIDTH: usize = 20;

pub fn run_report_csv(report: &RunReport) -> String {
    let mut lines = vec![RUN_HEADER.to_string()];
    lines.push(pad(record_fields(&report.record, "summary", ""), RUN_WIDTH));
    for a in &report.allocations {
        let mut fields = record_fields(&report.record, "alloc", "");
        fields[6].clear(); // partition/allocation live on the summary row
        fields[7].clear();
        fields[8].clear();
        fields[9].clear();
        fields[10].clear();
        fields.extend([
            csv_escape(&a.coalition),
            a.cell.to_string(),
            f(a.revenue),
            f(a.cost),
            f(a.profit),
            f(a.completion_time_s),
        ]);
        lines.push(pad(fields, RUN_WIDTH));
    }
    if let Some(trace) = &report.trace {
        for t in trace {
            let detail = if t.detail.is_empty() {
                t.step.clone()
            } else {
                format!("{} {}", t.step, t.detail)
            };
            let mut fields = record_fields(&report.record, "trace", &detail);
            fields[6] = csv_escape(&t.partition);
            fields[7] = csv_escape(&t.allocation);
            fields[8] = f(t.total_profit);
            fields[9].clear();
            fields[10].clear();
            lines.push(pad(fields, RUN_WIDTH));
        }
    }
    if let Some(o) = &report.oracle {
        let mut fields = record_fields(&report.record, "oracle", "");
        fields[6] = csv_escape(&o.best_partition);
        fields[7].clear();
        fields[8] = f(o.best_total_profit);
        fields[9].clear();
        fields[10].clear();
        fields.resize(17, String::new());
        fields.extend([
            f(o.optimality_gap),
            o.stability_certified.to_string(),
            o.partitions_evaluated.to_string(),
        ]);
        lines.push(pad(fields, RUN_WIDTH));
    }
    lines.join("\n") + "\n"
}

pub fn sweep_csv(records: &[ExperimentRecord]) -> String {
    let mut lines = vec![RUN_HEADER.to_string()];
    for r in records {
        lines.push(pad(record_fields(r, "summary", ""), RUN_WIDTH));
    }
    lines.join("\n") + "\n"
}

pub const TABLES_HEADER: &str = "table,coalition,cell,value,revenue,cost,profit";

pub fn tables_csv(rows: &[TableRow]) -> String {
    let mut lines = vec![TABLES_HEADER.to_string()];
    for r in rows {
        lines.push(
            [
                r.table.clone(),
                csv_escape(&r.coalition),
                r.cell.to_string(),
                f(r.value),
                f(r.revenue),
                f(r.cost),
                f(r.profit),
            ]
            .join(","),
        );
    }
    lines.join("\n") + "\n"
}

pub const COMPARE_HEADER: &str = "round,scheme,seed,total_profit,partition,allocation";

pub fn compare_csv(rows: &[CompareRow]) -> String {
    let mut lines = vec![COMPARE_HEADER.to_string()];
    for r in rows {
        lines.push(
            [
                r.round.to_string(),
                r.scheme.clone(),
                r.seed.to_string(),
                f(r.total_profit),
                csv_escape(&r.partition),
                csv_escape(&r.allocation),
            ]
            .join(","),
        );
    }
    lines.join("\n") + "\n"
}

pub const COMMTIME_HEADER: &str = "draw,worker_time_s,uav_time_s";

pub fn commtime_csv(rows: &[CommtimeRow]) -> String {
    let mut lines = vec![COMMTIME_HEADER.to_string()];
    for r in rows {
        lines.push([r.draw.to_string(), f(r.worker_time_s), f(r.uav_time_s)].join(","));
    }
    lines.join("\n") + "\n"
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes") + "\n"
}
