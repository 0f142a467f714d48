//! Round-trippable text format for quantum strategies.
//!
//! Layout: a `strategy` header line, one `state` line with "re,im" amplitude
//! pairs, then one `measurement party=I input=X outcome=T` header per
//! projector followed by its rows, entries as "re,im" pairs. `#` starts a
//! comment. f64 values print in shortest round-trip form.

use num_complex::Complex64;

use crate::linalg::{CMatrix, CVector};
use crate::{QuantumError, QuantumStrategy};

fn fmt_c(z: &Complex64) -> String {
    format!("{},{}", z.re, z.im)
}

fn parse_c(s: &str) -> Option<Complex64> {
    let (re, im) = s.split_once(',')?;
    Some(Complex64::new(re.trim().parse().ok()?, im.trim().parse().ok()?))
}

pub fn write_strategy(qs: &QuantumStrategy) -> String {
    let mut out = String::new();
    let inputs: Vec<String> = qs.measurements.iter().map(|p| p.len().to_string()).collect();
    out.push_str(&format!(
        "strategy parties={} dim={} outcomes={} inputs={}\n",
        qs.parties,
        qs.local_dim,
        qs.outcomes,
        inputs.join(",")
    ));
    let amps: Vec<String> = qs.state.iter().map(fmt_c).collect();
    out.push_str(&format!("state {}\n", amps.join(" ")));
    for (party, per_input) in qs.measurements.iter().enumerate() {
        for (input, projectors) in per_input.iter().enumerate() {
            for (outcome, m) in projectors.iter().enumerate() {
                out.push_str(&format!(
                    "measurement party={party} input={input} outcome={outcome}\n"
                ));
                for r in 0..m.nrows() {
                    let row: Vec<String> = (0..m.ncols()).map(|c| fmt_c(&m[(r, c)])).collect();
                    out.push_str(&row.join(" "));
                    out.push('\n');
                }
            }
        }
    }
    out
}

pub fn parse_strategy(text: &str) -> Result<QuantumStrategy, QuantumError> {
    let bad = |msg: &str| QuantumError::BadStrategy(format!("parse: {msg}"));
    let mut lines = text
        .lines()
        .map(|l| match l.find('#') {
            Some(p) => &l[..p],
            None => l,
        })
        .map(str::trim)
        .filter(|l| !l.is_empty());

    let header = lines.next().ok_or_else(|| bad("empty input"))?;
    let mut parties = None;
    let mut dim = None;
    let mut outcomes = None;
    let mut inputs: Option<Vec<usize>> = None;
    let rest = header
        .strip_prefix("strategy")
        .ok_or_else(|| bad("missing strategy header"))?;
    for field in rest.split_whitespace() {
        let (key, value) = field.split_once('=').ok_or_else(|| bad("field syntax"))?;
        match key {
            "parties" => parties = value.parse().ok(),
            "dim" => dim = value.parse().ok(),
            "outcomes" => outcomes = value.parse().ok(),
            "inputs" => {
                inputs = value
                    .split(',')
                    .map(|v| v.parse().ok())
                    .collect::<Option<Vec<usize>>>()
            }
            _ => return Err(bad(&format!("unknown header key {key}"))),
        }
    }
    let parties: usize = parties.ok_or_else(|| bad("missing parties"))?;
    let dim: usize = dim.ok_or_else(|| bad("missing dim"))?;
    let outcomes: usize = outcomes.ok_or_else(|| bad("missing outcomes"))?;
    let inputs = inputs.ok_or_else(|| bad("missing inputs"))?;
    if inputs.len() != parties {
        return Err(bad("inputs list length"));
    }

    let state_line = lines.next().ok_or_else(|| bad("missing state line"))?;
    let amps = state_line
        .strip_prefix("state")
        .ok_or_else(|| bad("missing state line"))?;
    let state_vals: Option<Vec<Complex64>> =
        amps.split_whitespace().map(parse_c).collect();
    let state_vals = state_vals.ok_or_else(|| bad("bad amplitude"))?;
    if state_vals.len() != dim.pow(parties as u32) {
        return Err(bad("state length"));
    }
    let state = CVector::from_vec(state_vals);

    let mut measurements: Vec<Vec<Vec<CMatrix>>> = inputs
        .iter()
        .map(|&m| vec![Vec::new(); m])
        .collect();
    let mut pending: Vec<(usize, usize, usize)> = Vec::new();
    let mut rows: Vec<Vec<Complex64>> = Vec::new();
    let flush = |pending: &mut Vec<(usize, usize, usize)>,
                     rows: &mut Vec<Vec<Complex64>>,
                     measurements: &mut Vec<Vec<Vec<CMatrix>>>|
     -> Result<(), QuantumError> {
        if let Some((party, input, outcome)) = pending.pop() {
            if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                return Err(QuantumError::BadStrategy("parse: projector shape".into()));
            }
            let flat: Vec<Complex64> = rows.drain(..).flatten().collect();
            let m = CMatrix::from_row_slice(dim, dim, &flat);
            let slot = &mut measurements[party][input];
            if slot.len() != outcome {
                return Err(QuantumError::BadStrategy(
                    "parse: outcomes out of order".into(),
                ));
            }
            slot.push(m);
        }
        Ok(())
    };

    for line in lines {
        if let Some(rest) = line.strip_prefix("measurement") {
            flush(&mut pending, &mut rows, &mut measurements)?;
            let mut party = None;
            let mut input = None;
            let mut outcome = None;
            for field in rest.split_whitespace() {
                let (key, value) = field.split_once('=').ok_or_else(|| bad("field syntax"))?;
                match key {
                    "party" => party = value.parse().ok(),
                    "input" => input = value.parse().ok(),
                    "outcome" => outcome = value.parse().ok(),
                    _ => return Err(bad(&format!("unknown measurement key {key}"))),
                }
            }
            let party: usize = party.ok_or_else(|| bad("missing party"))?;
            let input: usize = input.ok_or_else(|| bad("missing input"))?;
            let outcome: usize = outcome.ok_or_else(|| bad("missing outcome"))?;
            if party >= parties || input >= inputs[party] || outcome >= outcomes {
                return Err(bad("measurement indices out of range"));
            }
            pending.push((party, input, outcome));
        } else {
            let row: Option<Vec<Complex64>> = line.split_whitespace().map(parse_c).collect();
            rows.push(row.ok_or_else(|| bad("bad matrix entry"))?);
        }
    }
    flush(&mut pending, &mut rows, &mut measurements)?;

    for (party, per_input) in measurements.iter().enumerate() {
        for (input, projectors) in per_input.iter().enumerate() {
            if projectors.len() != outcomes {
                return Err(bad(&format!(
                    "party {party} input {input} has {} projectors, expected {outcomes}",
                    projectors.len()
                )));
            }
        }
    }

    Ok(QuantumStrategy {
        parties,
        local_dim: dim,
        outcomes,
        state,
        measurements,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{seesaw, SeesawOptions};
    use smells_core::catalog::catalog_get;

    #[test]
    fn strategy_round_trip() {
        let chsh = &catalog_get("chsh-smells").unwrap().ineq;
        let opts = SeesawOptions { restarts: 2, ..Default::default() };
        let out = seesaw(chsh, 2, &opts).unwrap();
        let text = write_strategy(&out.strategy);
        let back = parse_strategy(&text).unwrap();
        back.validate().unwrap();
        assert_eq!(back.state, out.strategy.state);
        assert_eq!(back.measurements, out.strategy.measurements);
    }

    #[test]
    fn parse_rejects_malformed() {
        assert!(parse_strategy("").is_err());
        assert!(parse_strategy("strategy parties=2 dim=2 outcomes=2 inputs=2,2\nstate 1,0\n").is_err());
    }
}
