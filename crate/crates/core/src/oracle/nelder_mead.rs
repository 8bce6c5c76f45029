//! Small two-dimensional Nelder–Mead minimizer.

#[derive(Debug, Clone, Copy)]
pub struct NelderMead {
    pub max_iterations: usize,
    /// Stop once the simplex values spread less than this...
    pub tolerance: f64,
    /// ...and the simplex is smaller than this.
    pub x_tolerance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub point: [f64; 2],
    pub value: f64,
    pub iterations: usize,
}

impl NelderMead {
    pub fn minimize<F>(&self, mut f: F, start: [f64; 2], step: [f64; 2]) -> Minimum
    where
        F: FnMut([f64; 2]) -> f64,
    {
        let mut simplex = [start, [start[0] + step[0], start[1]], [start[0], start[1] + step[1]]];
        let mut values = simplex.map(&mut f);
        let mut iterations = 0;

        while iterations < self.max_iterations {
            iterations += 1;
            let mut order = [0usize, 1, 2];
            order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
            simplex = order.map(|i| simplex[i]);
            values = order.map(|i| values[i]);

            let size = simplex[1..].iter().map(|p| (p[0] - simplex[0][0]).abs().max((p[1] - simplex[0][1]).abs())).fold(0.0, f64::max);
            if (values[2] - values[0]).abs() < self.tolerance && size < self.x_tolerance {
                break;
            }
            if values[0] == f64::INFINITY {
                // nowhere feasible in the simplex, nothing to follow
                break;
            }

            let centroid = [(simplex[0][0] + simplex[1][0]) / 2.0, (simplex[0][1] + simplex[1][1]) / 2.0];
            let toward =
                |coef: f64| [centroid[0] + coef * (simplex[2][0] - centroid[0]), centroid[1] + coef * (simplex[2][1] - centroid[1])];

            let reflected = toward(-1.0);
            let fr = f(reflected);
            if fr < values[0] {
                let expanded = toward(-2.0);
                let fe = f(expanded);
                if fe < fr {
                    simplex[2] = expanded;
                    values[2] = fe;
                } else {
                    simplex[2] = reflected;
                    values[2] = fr;
                }
                continue;
            }
            if fr < values[1] {
                simplex[2] = reflected;
                values[2] = fr;
                continue;
            }
            let (contracted, fc) = if fr < values[2] {
                let c = toward(-0.5);
                (c, f(c))
            } else {
                let c = toward(0.5);
                (c, f(c))
            };
            if fc < values[2].min(fr) {
                simplex[2] = contracted;
                values[2] = fc;
                continue;
            }
            // shrink toward the best vertex
            for i in 1..3 {
                simplex[i] = [simplex[0][0] + 0.5 * (simplex[i][0] - simplex[0][0]), simplex[0][1] + 0.5 * (simplex[i][1] - simplex[0][1])];
                values[i] = f(simplex[i]);
            }
        }

        let best = (0..3).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap_or(0);
        Minimum { point: simplex[best], value: values[best], iterations }
    }
}
