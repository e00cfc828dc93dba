//! Rolling-window one-step-ahead forecasting on CSV panels, scored by
//! out-of-sample R² against the rolling mean.

mod ingest;
mod rolling;
mod synthetic;

pub use ingest::{ingest_csv, ingest_reader, ImputePolicy, IngestOptions, PanelData};
pub use rolling::{out_of_sample_r2, rolling_forecast, ForecastMethod, ForecastResult, KPolicy, RollingConfig};
pub use synthetic::{synthetic_panel, SyntheticPanelConfig};
