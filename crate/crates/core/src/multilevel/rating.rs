use num_rational::Ratio;

use crate::model::{Graph, NodeId, Weight};

/// Exact edge rating `w / (q(u) * q(v))`, compared without rounding.
pub type Rating = Ratio<u128>;

/// Quantity `q` in the denominator of the `exp*` rating.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RatingDenominator {
    /// Node weight `c(v)`.
    #[default]
    NodeWeight,
    /// Sum of incident edge weights.
    WeightedDegree,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RatedEdge {
    pub u: NodeId,
    pub v: NodeId,
    pub weight: Weight,
    pub rating: Rating,
}

fn denominator_factor(graph: &Graph, v: NodeId, kind: RatingDenominator) -> u128 {
    let q = match kind {
        RatingDenominator::NodeWeight => graph.node_weight(v),
        RatingDenominator::WeightedDegree => graph.weighted_degree(v),
    };
    // Zero-weight nodes would make the rating undefined.
    q.max(1) as u128
}

/// `exp*(e) = w(e) / (q(u) q(v))` for every undirected edge, in
/// [`Graph::edges`] order.
pub fn rate_edges(graph: &Graph, kind: RatingDenominator) -> Vec<RatedEdge> {
    let q: Vec<u128> = (0..graph.n())
        .map(|v| denominator_factor(graph, v, kind))
        .collect();
    graph
        .edges()
        .map(|(u, v, w)| RatedEdge {
            u,
            v,
            weight: w,
            rating: Rating::new_raw(w as u128, q[u] * q[v]),
        })
        .collect()
}

pub(crate) fn rating_to_f64(r: &Rating) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direct_formula() {
        let g = Graph::from_edges(2, &[(0, 1, 4)], Some(vec![2, 2])).unwrap();
        let r = rate_edges(&g, RatingDenominator::NodeWeight);
        assert_eq!(r[0].rating, Rating::from_integer(1));
    }

    #[test]
    fn lighter_endpoints_rate_higher() {
        let g = Graph::from_edges(4, &[(0, 1, 3), (2, 3, 3)], Some(vec![1, 2, 3, 3])).unwrap();
        let r = rate_edges(&g, RatingDenominator::NodeWeight);
        assert!(r[0].rating > r[1].rating);
    }

    #[test]
    fn zero_weight_nodes_use_unit_factor() {
        let g = Graph::from_edges(2, &[(0, 1, 6)], Some(vec![0, 3])).unwrap();
        let r = rate_edges(&g, RatingDenominator::NodeWeight);
        assert_eq!(r[0].rating, Rating::from_integer(2));
    }

    #[test]
    fn weighted_degree_denominator() {
        let g = Graph::from_edges(3, &[(0, 1, 2), (1, 2, 4)], None).unwrap();
        let r = rate_edges(&g, RatingDenominator::WeightedDegree);
        assert_eq!(r[0].rating, Rating::new(2, 12));
        assert_eq!(r[1].rating, Rating::new(4, 24));
    }

    #[test]
    fn comparisons_are_exact_for_huge_values() {
        let big = u64::MAX as u128;
        let a = Rating::new_raw(big, big * big);
        let b = Rating::new_raw(big - 1, (big - 1) * big);
        assert_eq!(a.cmp(&b), std::cmp::Ordering::Equal);
        let c = Rating::new_raw(big, big * big - 1);
        assert!(c > a);
    }
}
