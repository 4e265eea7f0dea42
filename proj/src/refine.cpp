#include <nhd/refine.hpp>

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace nhd
{
	namespace
	{
		using Tri = std::array<int, 3>;

		std::uint64_t key(int a, int b)
		{
			if (a > b)
				std::swap(a, b);
			return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
		}

		struct Work
		{
			std::vector<Vec2> vertices;
			std::vector<Tri> triangles;
			std::vector<Region> regions;
			std::vector<double> targets;

			double diameter(const Tri &t) const
			{
				const Vec2 &a = vertices[t[0]], &b = vertices[t[1]], &c = vertices[t[2]];
				return std::sqrt(std::max({(a - b).squaredNorm(), (b - c).squaredNorm(), (c - a).squaredNorm()}));
			}
		};

		Work to_work(const Mesh2D &mesh)
		{
			return {mesh.vertices(), mesh.triangles(), mesh.regions(), std::vector<double>(mesh.num_triangles(), 0.0)};
		}

		// Bisect the refinement edge of every wanted triangle, closing the marked
		// edge set so that the result is conforming.
		void bisect_pass(Work &w, const std::vector<char> &wanted, const RefineOptions &options)
		{
			std::unordered_map<std::uint64_t, int> marked;
			const int nt = static_cast<int>(w.triangles.size());
			for (int t = 0; t < nt; ++t)
				if (wanted[t])
					marked.emplace(key(w.triangles[t][1], w.triangles[t][2]), -1);

			bool changed = true;
			int sweeps = 0;
			while (changed)
			{
				if (++sweeps > options.max_closure_sweeps)
					throw GeometryError("conforming closure did not terminate");
				changed = false;
				for (const Tri &t : w.triangles)
				{
					const auto ref = key(t[1], t[2]);
					if (marked.count(ref))
						continue;
					if (marked.count(key(t[2], t[0])) || marked.count(key(t[0], t[1])))
					{
						marked.emplace(ref, -1);
						changed = true;
					}
				}
			}

			// Midpoints numbered in triangle order for reproducibility.
			for (const Tri &t : w.triangles)
				for (int i = 0; i < 3; ++i)
				{
					const int a = t[(i + 1) % 3], b = t[(i + 2) % 3];
					auto it = marked.find(key(a, b));
					if (it != marked.end() && it->second < 0)
					{
						it->second = static_cast<int>(w.vertices.size());
						w.vertices.push_back(0.5 * (w.vertices[a] + w.vertices[b]));
					}
				}

			Work out;
			out.vertices = std::move(w.vertices);
			out.triangles.reserve(2 * nt);
			auto split = [&](const Tri &t, Region r, double target, auto &self) -> void {
				auto it = marked.find(key(t[1], t[2]));
				if (it == marked.end())
				{
					out.triangles.push_back(t);
					out.regions.push_back(r);
					out.targets.push_back(target);
					return;
				}
				const int m = it->second;
				self(Tri{m, t[0], t[1]}, r, target, self);
				self(Tri{m, t[2], t[0]}, r, target, self);
			};
			for (int t = 0; t < nt; ++t)
				split(w.triangles[t], w.regions[t], w.targets[t], split);
			w = std::move(out);
		}

		Mesh2D to_mesh(Work &&w)
		{
			return Mesh2D(std::move(w.vertices), std::move(w.triangles), std::move(w.regions));
		}

		void refine_to_targets(Work &w, const RefineOptions &options)
		{
			for (int pass = 0;; ++pass)
			{
				std::vector<char> wanted(w.triangles.size(), 0);
				bool any = false;
				for (std::size_t t = 0; t < w.triangles.size(); ++t)
					if (w.diameter(w.triangles[t]) > w.targets[t] * (1 + 1e-9))
					{
						wanted[t] = 1;
						any = true;
					}
				if (!any)
					return;
				if (pass >= options.max_passes)
					throw GeometryError("size-driven refinement exceeded its pass limit");
				bisect_pass(w, wanted, options);
			}
		}
	} // namespace

	Mesh2D refine(const Mesh2D &mesh, const SizeField &sizes, const RefineOptions &options)
	{
		if (static_cast<int>(sizes.sizes.size()) != mesh.num_vertices())
			throw GeometryError("size field must provide one size per vertex");
		for (double s : sizes.sizes)
			if (!(s > 0) || !std::isfinite(s))
				throw GeometryError("mesh sizes must be positive and finite");

		Work w = to_work(mesh);
		for (int t = 0; t < mesh.num_triangles(); ++t)
		{
			const auto &tri = mesh.triangle(t);
			w.targets[t] = std::min({sizes.sizes[tri[0]], sizes.sizes[tri[1]], sizes.sizes[tri[2]]});
		}
		refine_to_targets(w, options);
		return to_mesh(std::move(w));
	}

	Mesh2D bisect_all(const Mesh2D &mesh)
	{
		Work w = to_work(mesh);
		bisect_pass(w, std::vector<char>(mesh.num_triangles(), 1), RefineOptions{});
		return to_mesh(std::move(w));
	}

	Mesh2D refine_to_size(const Mesh2D &mesh, double hmax, const RefineOptions &options)
	{
		if (!(hmax > 0))
			throw GeometryError("maximal mesh size must be positive");
		Work w = to_work(mesh);
		std::fill(w.targets.begin(), w.targets.end(), hmax);
		refine_to_targets(w, options);
		return to_mesh(std::move(w));
	}
} // namespace nhd
