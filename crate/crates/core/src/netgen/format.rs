use super::GenError;
use crate::network::{NetworkInstance, Station, StationId};
use crate::scalar::Real;
use crate::sinr::{Point, SinrParams};
use std::fmt::Write;

/// Header `NET n N r`, then one `id x y` line per station, twelve decimals.
pub fn write_instance<T: Real>(net: &NetworkInstance<T>, p: &SinrParams<T>) -> String {
    let mut s = format!("NET {} {} {:.12}\n", net.len(), net.id_space(), p.range().to_f64_lossy());
    for st in net.stations() {
        writeln!(s, "{} {:.12} {:.12}", st.id, st.pos.x.to_f64_lossy(), st.pos.y.to_f64_lossy()).expect("string write");
    }
    s
}

/// Parses the format of [`write_instance`]. The recorded range is informational.
pub fn read_instance<T: Real>(text: &str) -> Result<NetworkInstance<T>, GenError> {
    let err = |line: usize, msg: &str| GenError::Parse { line, msg: msg.to_string() };
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| err(1, "missing header"))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    let [tag, n, space, r] = h.as_slice() else {
        return Err(err(1, "expected `NET n N r`"));
    };
    if *tag != "NET" || r.parse::<f64>().is_err() {
        return Err(err(1, "expected `NET n N r`"));
    }
    let n: usize = n.parse().map_err(|_| err(1, "bad n"))?;
    let space: u32 = space.parse().map_err(|_| err(1, "bad N"))?;
    let mut stations = Vec::with_capacity(n);
    for (i, line) in lines {
        let f: Vec<&str> = line.split_whitespace().collect();
        let [id, x, y] = f.as_slice() else {
            return Err(err(i + 1, "expected `id x y`"));
        };
        let id: u32 = id.parse().map_err(|_| err(i + 1, "bad id"))?;
        let x: f64 = x.parse().map_err(|_| err(i + 1, "bad x"))?;
        let y: f64 = y.parse().map_err(|_| err(i + 1, "bad y"))?;
        stations.push(Station { id: StationId(id), pos: Point::new(T::lit(x), T::lit(y)) });
    }
    if stations.len() != n {
        return Err(err(1, "station count differs from header"));
    }
    Ok(NetworkInstance::new(stations, space)?)
}
