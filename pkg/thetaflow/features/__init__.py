# features package init: stencils, stability, stepping, data, references, analysis
