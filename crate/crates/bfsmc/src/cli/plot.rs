//! Gnuplot script emission. The scripts are plain text referencing the
//! trajectory CSVs written next to them; no plotting happens in-process.

use crate::regions::RegionBounds;

fn header(output: &str) -> String {
    format!(
        "set datafile separator ','\n\
         set terminal pngcairo size 1200,500\n\
         set output '{output}'\n\
         set key top right\n"
    )
}

/// State + control panels with barrier, final-set and capacity guide lines.
pub fn barrier_script(bounds: RegionBounds, c1: f64) -> String {
    let mut s = header("barrier.png");
    s.push_str(&format!(
        "set multiplot layout 1,2\n\
         set title 'state'\n\
         set xlabel 't [s]'\n\
         plot 'barrier.csv' using 1:2 with lines title 'x(t)', \\\n\
              {eps} with lines dt 2 lc 'red' title 'barrier', \\\n\
              -{eps} with lines dt 2 lc 'red' notitle, \\\n\
              {xf} with lines dt 3 lc 'blue' title 'final set', \\\n\
              -{xf} with lines dt 3 lc 'blue' notitle\n\
         set title 'control'\n\
         plot 'barrier.csv' using 1:3 with lines title 'u(t)', \\\n\
              {c1} with lines dt 2 lc 'red' title 'capacity', \\\n\
              -{c1} with lines dt 2 lc 'red' notitle\n\
         unset multiplot\n",
        eps = bounds.epsilon,
        xf = bounds.x_f,
    ));
    s
}

/// Two sampling intervals of the escape run against the barrier lines.
pub fn escape_script(epsilon: f64) -> String {
    let mut s = header("escape.png");
    s.push_str(&format!(
        "set title 'one-interval escape'\n\
         set xlabel 't [s]'\n\
         plot 'escape.csv' using 1:2 with lines title 'x(t)', \\\n\
              {epsilon} with lines dt 2 lc 'red' title 'barrier', \\\n\
              -{epsilon} with lines dt 2 lc 'red' notitle\n"
    ));
    s
}

/// Side-by-side control effort and state of the two comparison runs.
pub fn linear_vs_bfa_script() -> String {
    let mut s = header("linear_vs_bfa.png");
    s.push_str(
        "set multiplot layout 1,2\n\
         set title 'control effort'\n\
         set xlabel 't [s]'\n\
         plot 'lvb_bfa.csv' using 1:3 with lines title 'barrier law', \\\n\
              'lvb_linear.csv' using 1:3 with lines title 'saturated linear'\n\
         set title 'state'\n\
         plot 'lvb_bfa.csv' using 1:2 with lines title 'barrier law', \\\n\
              'lvb_linear.csv' using 1:2 with lines title 'saturated linear'\n\
         unset multiplot\n",
    );
    s
}

/// Adaptive gain trace against the constant reference gain.
pub fn gains_script() -> String {
    let mut s = header("gains.png");
    s.push_str(
        "set title 'adaptive vs constant gain'\n\
         set xlabel 't [s]'\n\
         # adaptive gain reconstructed from the state column: 1/(eps - |x|)\n\
         eps = 0.5\n\
         plot 'gains.csv' using 1:(1/(eps - abs($2))) with lines title 'barrier gain', \\\n\
              17 with lines dt 2 title 'constant gain'\n",
    );
    s
}

/// The two reaching runs from near and far initial conditions.
pub fn reaching_script() -> String {
    let mut s = header("reaching.png");
    s.push_str(
        "set multiplot layout 1,2\n\
         set title 'x0 = 0.201'\n\
         set xlabel 't [s]'\n\
         plot 'reaching_near.csv' using 1:2 with lines title 'x(t)'\n\
         set title 'x0 = 201'\n\
         plot 'reaching_far.csv' using 1:2 with lines title 'x(t)'\n\
         unset multiplot\n",
    );
    s
}
