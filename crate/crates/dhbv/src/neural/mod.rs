//! Neural layers built directly on the autodiff tape: a linear layer, an
//! LSTM cell, the parameterization network, the effective-rainfall gate
//! network, and a purely data-driven LSTM streamflow baseline.

mod linear;
mod lstm;
mod nnr;
mod param_net;
mod streamflow;

pub use linear::{LinearLayer, LinearVars};
pub use lstm::{lstm_forward, lstm_step, LstmParams, LstmVars};
pub use nnr::{nnr_forward, NnrConfig, NnrNet, NnrVars, NNR_INPUT_DIM};
pub use param_net::{
    param_net_forward, param_net_forward_values, ParamNet, ParamNetConfig, ParamNetOutput,
    ParamNetValues, ParamNetVars,
};
pub use streamflow::{
    lstm_streamflow_forward, lstm_streamflow_forward_values, StreamflowLstm, StreamflowLstmVars,
    StreamflowOutput,
};
