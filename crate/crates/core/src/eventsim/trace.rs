use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::certificates::Topology;

/// Uniformly sampled closed-loop record, stored column-wise. Vector columns are
/// row-major with `width` entries per sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub topology: Topology,
    pub width: usize,
    pub t: Vec<f64>,
    pub w1: Vec<f64>,
    pub w2: Vec<f64>,
    pub u_p: Vec<f64>,
    pub u_c: Vec<f64>,
    pub y_p: Vec<f64>,
    pub y_c: Vec<f64>,
    pub y_p_held: Vec<f64>,
    pub y_c_held: Vec<f64>,
    pub e_p: Vec<f64>,
    pub e_c: Vec<f64>,
    pub event_p: Vec<bool>,
    pub event_c: Vec<bool>,
    /// Held and error columns of a side without a detector are zero.
    pub has_detector_p: bool,
    pub has_detector_c: bool,
    pub zero_initial_state: bool,
    /// Time at which a non-finite value appeared; the trace stops before it.
    pub diverged: Option<f64>,
}

/// One row of a [`Trace`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample<'a> {
    pub t: f64,
    pub w1: &'a [f64],
    pub w2: &'a [f64],
    pub u_p: &'a [f64],
    pub u_c: &'a [f64],
    pub y_p: &'a [f64],
    pub y_c: &'a [f64],
    pub y_p_held: &'a [f64],
    pub y_c_held: &'a [f64],
    pub e_p: &'a [f64],
    pub e_c: &'a [f64],
    pub event_p: bool,
    pub event_c: bool,
}

/// Owned row, used to build traces.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Row {
    pub t: f64,
    pub w1: Vec<f64>,
    pub w2: Vec<f64>,
    pub u_p: Vec<f64>,
    pub u_c: Vec<f64>,
    pub y_p: Vec<f64>,
    pub y_c: Vec<f64>,
    pub y_p_held: Vec<f64>,
    pub y_c_held: Vec<f64>,
    pub e_p: Vec<f64>,
    pub e_c: Vec<f64>,
    pub event_p: bool,
    pub event_c: bool,
}

pub const CSV_COLUMNS: [&str; 13] = [
    "t", "w1", "w2", "u_p", "u_c", "y_p", "y_c", "y_p_held", "y_c_held", "e_p", "e_c", "event_p", "event_c",
];

impl Trace {
    pub fn new(topology: Topology, width: usize) -> Self {
        Trace {
            topology,
            width,
            t: Vec::new(),
            w1: Vec::new(),
            w2: Vec::new(),
            u_p: Vec::new(),
            u_c: Vec::new(),
            y_p: Vec::new(),
            y_c: Vec::new(),
            y_p_held: Vec::new(),
            y_c_held: Vec::new(),
            e_p: Vec::new(),
            e_c: Vec::new(),
            event_p: Vec::new(),
            event_c: Vec::new(),
            has_detector_p: topology.detects_plant(),
            has_detector_c: topology.detects_controller(),
            zero_initial_state: true,
            diverged: None,
        }
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Appends a row; short vector fields are zero-padded to `width`.
    pub fn push(&mut self, row: Row) {
        let w = self.width;
        let put = |col: &mut Vec<f64>, v: Vec<f64>| {
            let start = col.len();
            col.extend(v.into_iter().take(w));
            col.resize(start + w, 0.0);
        };
        self.t.push(row.t);
        put(&mut self.w1, row.w1);
        put(&mut self.w2, row.w2);
        put(&mut self.u_p, row.u_p);
        put(&mut self.u_c, row.u_c);
        put(&mut self.y_p, row.y_p);
        put(&mut self.y_c, row.y_c);
        put(&mut self.y_p_held, row.y_p_held);
        put(&mut self.y_c_held, row.y_c_held);
        put(&mut self.e_p, row.e_p);
        put(&mut self.e_c, row.e_c);
        self.event_p.push(row.event_p);
        self.event_c.push(row.event_c);
    }

    pub fn sample(&self, k: usize) -> Sample<'_> {
        let w = self.width;
        let r = k * w..(k + 1) * w;
        Sample {
            t: self.t[k],
            w1: &self.w1[r.clone()],
            w2: &self.w2[r.clone()],
            u_p: &self.u_p[r.clone()],
            u_c: &self.u_c[r.clone()],
            y_p: &self.y_p[r.clone()],
            y_c: &self.y_c[r.clone()],
            y_p_held: &self.y_p_held[r.clone()],
            y_c_held: &self.y_c_held[r.clone()],
            e_p: &self.e_p[r.clone()],
            e_c: &self.e_c[r],
            event_p: self.event_p[k],
            event_c: self.event_c[k],
        }
    }

    pub fn samples(&self) -> impl Iterator<Item = Sample<'_>> {
        (0..self.len()).map(move |k| self.sample(k))
    }

    pub fn csv_header(&self) -> String {
        let mut cols = Vec::new();
        for name in CSV_COLUMNS {
            let vector = !matches!(name, "t" | "event_p" | "event_c");
            if vector && self.width > 1 {
                cols.extend((0..self.width).map(|i| format!("{name}[{i}]")));
            } else {
                cols.push(name.to_string());
            }
        }
        cols.join(",")
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{}", self.csv_header())?;
        for s in self.samples() {
            let mut line = s.t.to_string();
            for col in [s.w1, s.w2, s.u_p, s.u_c, s.y_p, s.y_c, s.y_p_held, s.y_c_held, s.e_p, s.e_c] {
                for v in col {
                    line.push(',');
                    line.push_str(&v.to_string());
                }
            }
            line.push_str(if s.event_p { ",1" } else { ",0" });
            line.push_str(if s.event_c { ",1" } else { ",0" });
            writeln!(out, "{line}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut tr = Trace::new(Topology::PlantSide, 1);
        tr.push(Row { t: 0.0, w1: vec![1.0], y_p: vec![0.5], y_p_held: vec![0.5], event_p: true, ..Row::default() });
        tr.push(Row { t: 0.1, w1: vec![1.0], y_p: vec![0.25], y_p_held: vec![0.5], e_p: vec![-0.25], ..Row::default() });
        let mut buf = Vec::new();
        tr.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "t,w1,w2,u_p,u_c,y_p,y_c,y_p_held,y_c_held,e_p,e_c,event_p,event_c");
        assert_eq!(lines[1], "0,1,0,0,0,0.5,0,0.5,0,0,0,1,0");
        assert_eq!(lines[2], "0.1,1,0,0,0,0.25,0,0.5,0,-0.25,0,0,0");
        assert_eq!(lines.len(), 3);
    }

    #[test]
    fn wide_header_is_suffixed() {
        let tr = Trace::new(Topology::BothSides, 2);
        assert!(tr.csv_header().starts_with("t,w1[0],w1[1],w2[0]"));
        assert!(tr.csv_header().ends_with("e_c[1],event_p,event_c"));
    }
}
