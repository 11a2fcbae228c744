/// Concrete route realizing a reported cost.
#[derive(Debug, Clone, PartialEq)]
pub enum Route {
    /// Closed tour: depot, the listed items in order, depot.
    Tour(Vec<usize>),
    /// Undirected tree edges over graph vertices; vertex 0 is the root.
    Tree(Vec<(usize, usize)>),
    /// Items of a tabulated cost, no geometry.
    Listed(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RouteWitness {
    pub route: Route,
    /// Route part of the cost: travel energy or tree delay.
    pub travel: f64,
    /// Sum of the per-item visiting costs.
    pub visiting: f64,
}

impl RouteWitness {
    pub fn cost(&self) -> f64 {
        self.travel + self.visiting
    }

    pub fn empty_tour() -> Self {
        Self {
            route: Route::Tour(Vec::new()),
            travel: 0.0,
            visiting: 0.0,
        }
    }

    pub fn empty_tree() -> Self {
        Self {
            route: Route::Tree(Vec::new()),
            travel: 0.0,
            visiting: 0.0,
        }
    }

    /// Tour order, if this is a tour.
    pub fn tour(&self) -> Option<&[usize]> {
        match &self.route {
            Route::Tour(order) => Some(order),
            _ => None,
        }
    }
}
