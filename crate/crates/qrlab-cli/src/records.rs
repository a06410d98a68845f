use serde::Serialize;

/// Schema tag written into every emitted row.
pub const SCHEMA_VERSION: u32 = 1;

/// One (code, p, recovery) evaluation of a sweep.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRecord {
    pub schema_version: u32,
    pub code: String,
    pub n_physical: usize,
    pub channel: String,
    pub p: f64,
    pub recovery: String,
    pub fe: Option<f64>,
    pub fe2: Option<f64>,
    pub t_re: Option<f64>,
    pub i_re: Option<f64>,
    pub slack_min: Option<f64>,
    pub bounds_hold: Option<bool>,
    pub mc_fe2: Option<f64>,
    /// Quantities left null, as `quantity: reason` strings.
    pub skipped: Vec<String>,
    /// Populated only when timings are requested; never part of the CSV.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

pub const SWEEP_HEADER: &str = "schema_version,code,n_physical,channel,p,recovery,fe,fe2,t_re,i_re,slack_min,bounds_hold,mc_fe2,skipped";

impl SweepRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.schema_version,
            self.code,
            self.n_physical,
            self.channel,
            fmt_f64(self.p),
            self.recovery,
            fmt_opt(self.fe),
            fmt_opt(self.fe2),
            fmt_opt(self.t_re),
            fmt_opt(self.i_re),
            fmt_opt(self.slack_min),
            fmt_opt_bool(self.bounds_hold),
            fmt_opt(self.mc_fe2),
            sanitise(&self.skipped.join("; ")),
        )
    }
}

/// One teacher-student grid point.
#[derive(Clone, Debug, Serialize)]
pub struct TsGridRecord {
    pub schema_version: u32,
    pub code: String,
    pub channel: String,
    pub recovery: String,
    pub p_star: f64,
    pub p_student: f64,
    pub fe: f64,
    pub fe2: f64,
    pub is_diagonal: bool,
}

pub const TS_GRID_HEADER: &str =
    "schema_version,code,channel,recovery,p_star,p_student,fe,fe2,is_diagonal";

impl TsGridRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.schema_version,
            self.code,
            self.channel,
            self.recovery,
            fmt_f64(self.p_star),
            fmt_f64(self.p_student),
            fmt_f64(self.fe),
            fmt_f64(self.fe2),
            self.is_diagonal,
        )
    }
}

/// A pairwise finite-size crossing estimate.
#[derive(Clone, Debug, Serialize)]
pub struct CrossingRecord {
    pub schema_version: u32,
    pub channel: String,
    pub recovery: String,
    pub code_a: String,
    pub code_b: String,
    pub crossing: Option<f64>,
    /// Spread (max - min) over all found pairwise crossings of this
    /// recovery; repeated on each row.
    pub spread: Option<f64>,
    pub note: String,
}

pub const CROSSING_HEADER: &str =
    "schema_version,channel,recovery,code_a,code_b,crossing,spread,note";

impl CrossingRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.schema_version,
            self.channel,
            self.recovery,
            self.code_a,
            self.code_b,
            fmt_opt(self.crossing),
            fmt_opt(self.spread),
            sanitise(&self.note),
        )
    }
}

/// Flattened bound-report row for CSV output (the JSON form carries the
/// full slack map).
pub const CERTIFY_HEADER: &str = "schema_version,code,n_physical,channel,p,fe_petz,fe_ml,fe_sampler_alpha,fe_sdp,fe_sw,t_re,i_re,f_opt_lower,f_opt_upper,f_opt_exact,min_slack,all_hold,skipped";

pub fn certify_csv_row(report: &qrlab::diagnostics::BoundReport) -> String {
    let skipped: Vec<String> = report
        .skipped
        .iter()
        .map(|s| format!("{}: {}", s.family, s.reason))
        .collect();
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        SCHEMA_VERSION,
        report.code,
        report.n_physical,
        report.channel,
        fmt_f64(report.p),
        fmt_opt(report.fe_petz),
        fmt_opt(report.fe_ml),
        fmt_opt(report.fe_sampler_alpha),
        fmt_opt(report.fe_sdp),
        fmt_opt(report.fe_sw),
        fmt_f64(report.t_re),
        fmt_f64(report.i_re),
        fmt_f64(report.f_opt_lower),
        fmt_f64(report.f_opt_upper),
        report.f_opt_exact,
        fmt_opt(report.min_slack()),
        report.all_hold,
        sanitise(&skipped.join("; ")),
    )
}

/// 12 significant digits, scientific; the fixed float form of every CSV.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.11e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn fmt_opt_bool(x: Option<bool>) -> String {
    x.map(|b| b.to_string()).unwrap_or_default()
}

/// Keeps free-text cells from breaking the CSV shape.
fn sanitise(text: &str) -> String {
    text.replace([',', '\n'], " ")
}
