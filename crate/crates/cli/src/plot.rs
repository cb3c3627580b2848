//! Gnuplot scripts that render the CSVs written next to them.

use inertial_kuramoto::export::format_sig;

fn preamble(name: &str) -> String {
    format!(
        "set terminal pngcairo size 900,600\n\
         set output '{name}.png'\n\
         set datafile separator ','\n\
         set key top left\n\
         set grid\n"
    )
}

pub fn curve_script(g0: f64) -> String {
    let mut s = preamble("curve");
    s.push_str(&format!(
        "set xlabel 'Re G(y)'\n\
         set ylabel 'Im G(y)'\n\
         set size ratio -1\n\
         set object 1 circle at {g0},0 size char 0.5 fc rgb 'red' fs solid\n\
         set label 1 'g_0' at {g0},0 offset 1,1\n\
         plot 'curve.csv' every ::1 using 2:3 with lines lw 2 title 'critical curve'\n",
        g0 = format_sig(g0)
    ));
    s
}

pub fn eig_script() -> String {
    let mut s = preamble("eig");
    s.push_str(
        "set xlabel 'K'\n\
         set ylabel 'lambda(K)'\n\
         set xzeroaxis lt -1\n\
         plot 'eig.csv' every ::1 using 1:2 with linespoints title 'Re lambda', \\\n\
         \x20    'eig.csv' every ::1 using 1:3 with linespoints title 'Im lambda'\n",
    );
    s
}

/// Sweep plot with dashed vertical lines at the predicted bifurcations.
pub fn sweep_script(mode: i64, marks: &[(f64, &str)]) -> String {
    let mut s = preamble("sweep");
    s.push_str("set xlabel 'K'\nset ylabel 'order parameter'\nset yrange [0:1]\n");
    for (i, (k, label)) in marks.iter().enumerate() {
        let k = format_sig(*k);
        s.push_str(&format!(
            "set arrow {id} from {k},graph 0 to {k},graph 1 nohead dt 2 lw 2 lc rgb 'red'\n\
             set label {id} '{label}' at {k},graph 0.95 offset 0.5,0 tc rgb 'red'\n",
            id = i + 1
        ));
    }
    s.push_str("plot 'sweep.csv' every ::1 using 1:2:3 with yerrorbars title '|r|'");
    if mode != 0 {
        s.push_str(&format!(", \\\n     'sweep.csv' every ::1 using 1:4 with linespoints title '|h_{mode}|'"));
    }
    s.push('\n');
    s
}
