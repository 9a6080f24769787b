use super::{Point, SinrParams};
use crate::network::{NetworkError, NetworkInstance, StationId, TransmissionSet};
use crate::scalar::Real;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("degenerate geometry: stations {0} and {1} coincide")]
    DegenerateGeometry(StationId, StationId),
    #[error("contract violation: {0}")]
    Contract(&'static str),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

/// Signal-to-interference-and-noise ratio of `sender` measured at `receiver`
/// while every station of `txset` transmits.
pub fn sinr_value<T: Real>(
    sender: StationId,
    receiver: StationId,
    txset: &TransmissionSet,
    net: &NetworkInstance<T>,
    p: &SinrParams<T>,
) -> Result<T, OracleError> {
    if !txset.contains(&sender) {
        return Err(OracleError::Contract("sender is not transmitting"));
    }
    if txset.contains(&receiver) {
        return Err(OracleError::Contract("receiver is transmitting"));
    }
    if sender == receiver {
        return Err(OracleError::Contract("sender equals receiver"));
    }
    let at = net.position(receiver)?;
    let d = net.position(sender)?.dist(&at);
    if d == T::zero() {
        return Err(OracleError::DegenerateGeometry(sender, receiver));
    }
    let mut interference = T::zero();
    for &w in txset.iter().filter(|&&w| w != sender) {
        let dw = net.position(w)?.dist(&at);
        if dw == T::zero() {
            return Err(OracleError::DegenerateGeometry(w, receiver));
        }
        interference = interference + p.signal_at(dw);
    }
    Ok(p.signal_at(d) / (p.noise + interference))
}

/// Reception predicate: half-duplex, sensitivity `(1+eps)·beta·noise` and SINR `>= beta`.
/// Both thresholds are closed.
pub fn receives<T: Real>(
    sender: StationId,
    receiver: StationId,
    txset: &TransmissionSet,
    net: &NetworkInstance<T>,
    p: &SinrParams<T>,
) -> bool {
    if sender == receiver || !txset.contains(&sender) || txset.contains(&receiver) {
        return false;
    }
    let (Ok(s), Ok(u)) = (net.position(sender), net.position(receiver)) else {
        return false;
    };
    if p.signal_at(s.dist(&u)) < p.sensitivity() {
        return false;
    }
    match sinr_value(sender, receiver, txset, net, p) {
        Ok(v) => v >= p.beta,
        Err(_) => false,
    }
}

/// Position-level form of [`receives`]: `interferers` excludes the sender.
pub fn receives_at<T: Real>(sender: Point<T>, receiver: Point<T>, interferers: &[Point<T>], p: &SinrParams<T>) -> bool {
    let signal = p.signal_at(sender.dist(&receiver));
    if !(signal >= p.sensitivity()) {
        return false;
    }
    let interference = interferers.iter().fold(T::zero(), |acc, w| acc + p.signal_at(w.dist(&receiver)));
    signal / (p.noise + interference) >= p.beta
}
