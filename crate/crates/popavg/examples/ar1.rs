// Direct AR(1) recursion with the same RNG machinery.
use popavg::seed::rng_for;
use rand_distr::{Distribution, StandardNormal};

fn main() {
    for t_steps in [120usize, 400] {
        for reps in [4000usize, 20000] {
            let mut finals = Vec::new();
            for r in 0..reps {
                let mut rng = rng_for(1234, r as u64);
                let mut x = 0.0f64;
                for _ in 0..t_steps {
                    let w: f64 = StandardNormal.sample(&mut rng);
                    x = 0.9 * x + w;
                }
                finals.push(x);
            }
            let m: f64 = finals.iter().sum::<f64>() / reps as f64;
            let v: f64 = finals.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (reps - 1) as f64;
            println!("T={t_steps} reps={reps}: var = {v:.4} (oracle 5.2632)");
        }
    }
}
