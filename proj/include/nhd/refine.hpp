#pragma once

#include "mesh.hpp"

#include <vector>

namespace nhd
{
	/// Target mesh size per vertex.
	struct SizeField
	{
		std::vector<double> sizes;
	};

	struct RefineOptions
	{
		int max_passes = 400;
		int max_closure_sweeps = 10000;
	};

	/// Newest-vertex bisection driven by a vertex size field.
	///
	/// Each input triangle K receives the target min_{a in K} sizes[a]; K and its
	/// descendants are bisected (with conforming closure) until their diameter is
	/// at most that target. No triangle is coarsened; region tags are inherited.
	Mesh2D refine(const Mesh2D &mesh, const SizeField &sizes, const RefineOptions &options = {});

	/// One round of newest-vertex bisection applied to every triangle.
	Mesh2D bisect_all(const Mesh2D &mesh);

	/// Bisect until every triangle has diameter at most hmax.
	Mesh2D refine_to_size(const Mesh2D &mesh, double hmax, const RefineOptions &options = {});
} // namespace nhd
