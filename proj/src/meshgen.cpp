#include <nhd/meshgen.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <unordered_map>
#include <unordered_set>

namespace nhd
{
	double signed_area(const Polygon &poly)
	{
		double a = 0;
		const std::size_t n = poly.size();
		for (std::size_t i = 0; i < n; ++i)
			a += cross2(poly[i], poly[(i + 1) % n]);
		return 0.5 * a;
	}

	bool point_in_polygon(const Vec2 &p, const Polygon &poly)
	{
		bool inside = false;
		const std::size_t n = poly.size();
		for (std::size_t i = 0, j = n - 1; i < n; j = i++)
		{
			const Vec2 &a = poly[i], &b = poly[j];
			if ((a(1) > p(1)) != (b(1) > p(1)))
			{
				const double x = a(0) + (p(1) - a(1)) * (b(0) - a(0)) / (b(1) - a(1));
				if (p(0) < x)
					inside = !inside;
			}
		}
		return inside;
	}

	namespace
	{
		double orient(const Vec2 &a, const Vec2 &b, const Vec2 &c)
		{
			const long double abx = b(0) - a(0), aby = b(1) - a(1);
			const long double acx = c(0) - a(0), acy = c(1) - a(1);
			return static_cast<double>(abx * acy - aby * acx);
		}

		bool segments_cross(const Vec2 &a, const Vec2 &b, const Vec2 &c, const Vec2 &d)
		{
			const double o1 = orient(a, b, c), o2 = orient(a, b, d);
			const double o3 = orient(c, d, a), o4 = orient(c, d, b);
			return ((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0));
		}

		double segment_distance(const Vec2 &p, const Vec2 &a, const Vec2 &b)
		{
			const Vec2 d = b - a;
			const double t = std::clamp((p - a).dot(d) / d.squaredNorm(), 0.0, 1.0);
			return (p - (a + t * d)).norm();
		}

		// Positive when d lies inside the circumcircle of counter-clockwise (a, b, c).
		long double incircle(const Vec2 &a, const Vec2 &b, const Vec2 &c, const Vec2 &d)
		{
			const long double adx = a(0) - d(0), ady = a(1) - d(1);
			const long double bdx = b(0) - d(0), bdy = b(1) - d(1);
			const long double cdx = c(0) - d(0), cdy = c(1) - d(1);
			const long double ad = adx * adx + ady * ady;
			const long double bd = bdx * bdx + bdy * bdy;
			const long double cd = cdx * cdx + cdy * cdy;
			return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
		}

		std::uint64_t key(int a, int b)
		{
			if (a > b)
				std::swap(a, b);
			return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
		}

		using Tri = std::array<int, 3>;

		std::vector<Tri> bowyer_watson(const std::vector<Vec2> &pts)
		{
			Vec2 lo = pts[0], hi = pts[0];
			for (const auto &p : pts)
			{
				lo = lo.cwiseMin(p);
				hi = hi.cwiseMax(p);
			}
			const Vec2 c = 0.5 * (lo + hi);
			const double r = 50.0 * std::max((hi - lo).maxCoeff(), 1.0);

			std::vector<Vec2> all = pts;
			const int n = static_cast<int>(pts.size());
			all.push_back(c + Vec2(-2 * r, -r));
			all.push_back(c + Vec2(2 * r, -r));
			all.push_back(c + Vec2(0, 2 * r));

			std::vector<Tri> tris{{n, n + 1, n + 2}};
			std::vector<char> alive{1};
			std::unordered_map<std::uint64_t, int> boundary_count;
			std::vector<int> cavity;

			for (int p = 0; p < n; ++p)
			{
				cavity.clear();
				for (std::size_t t = 0; t < tris.size(); ++t)
				{
					if (!alive[t])
						continue;
					const Tri &tr = tris[t];
					if (incircle(all[tr[0]], all[tr[1]], all[tr[2]], all[p]) > 0)
						cavity.push_back(static_cast<int>(t));
				}
				// Near-cocircular points can leave the cavity not star-shaped from p in
				// floating point; absorb the triangle behind each offending edge.
				for (int repair = 0;; ++repair)
				{
					boundary_count.clear();
					for (int t : cavity)
						for (int i = 0; i < 3; ++i)
							++boundary_count[key(tris[t][i], tris[t][(i + 1) % 3])];
					int bad_a = -1, bad_b = -1;
					for (int t : cavity)
						for (int i = 0; i < 3 && bad_a < 0; ++i)
						{
							const int a = tris[t][i], b = tris[t][(i + 1) % 3];
							if (boundary_count[key(a, b)] == 1 && orient(all[a], all[b], all[p]) <= 0)
								bad_a = a, bad_b = b;
						}
					if (bad_a < 0)
						break;
					if (repair > 64)
						throw GeometryError("Delaunay cavity is not star-shaped (degenerate point set)");
					int behind = -1;
					for (std::size_t t = 0; t < tris.size() && behind < 0; ++t)
						if (alive[t] && std::find(cavity.begin(), cavity.end(), static_cast<int>(t)) == cavity.end())
							for (int i = 0; i < 3; ++i)
								if (tris[t][i] == bad_b && tris[t][(i + 1) % 3] == bad_a)
									behind = static_cast<int>(t);
					if (behind < 0)
						throw GeometryError("Delaunay cavity is not star-shaped (degenerate point set)");
					cavity.push_back(behind);
				}
				for (int t : cavity)
					alive[t] = 0;
				for (int t : cavity)
					for (int i = 0; i < 3; ++i)
					{
						const int a = tris[t][i], b = tris[t][(i + 1) % 3];
						if (boundary_count[key(a, b)] != 1)
							continue;
						tris.push_back({a, b, p});
						alive.push_back(1);
					}
			}

			std::vector<Tri> out;
			for (std::size_t t = 0; t < tris.size(); ++t)
				if (alive[t] && tris[t][0] < n && tris[t][1] < n && tris[t][2] < n)
					out.push_back(tris[t]);
			return out;
		}

		bool has_edge(const std::vector<Tri> &tris, int a, int b)
		{
			for (const auto &t : tris)
				for (int i = 0; i < 3; ++i)
					if ((t[i] == a && t[(i + 1) % 3] == b) || (t[i] == b && t[(i + 1) % 3] == a))
						return true;
			return false;
		}

		// Flip edges crossing segment (a, b) until it appears in the triangulation.
		void recover_segment(const std::vector<Vec2> &pts, std::vector<Tri> &tris, int a, int b)
		{
			for (int iter = 0; iter < 10000; ++iter)
			{
				if (has_edge(tris, a, b))
					return;

				std::unordered_map<std::uint64_t, std::array<int, 2>> owner;
				for (int t = 0; t < static_cast<int>(tris.size()); ++t)
					for (int i = 0; i < 3; ++i)
					{
						auto [it, ins] = owner.try_emplace(key(tris[t][i], tris[t][(i + 1) % 3]), std::array<int, 2>{t, -1});
						if (!ins)
							it->second[1] = t;
					}

				bool flipped = false;
				for (const auto &[k, tt] : owner)
				{
					const int c = static_cast<int>(k >> 32), d = static_cast<int>(k & 0xffffffffu);
					if (tt[1] < 0 || !segments_cross(pts[a], pts[b], pts[c], pts[d]))
						continue;
					auto apex = [&](int t) {
						for (int v : tris[t])
							if (v != c && v != d)
								return v;
						return -1;
					};
					const int x = apex(tt[0]), y = apex(tt[1]);
					// The quad (c, d, x, y) is convex iff x and y lie on opposite sides of c-d
					// and c and d lie on opposite sides of x-y.
					if (!segments_cross(pts[c], pts[d], pts[x], pts[y]))
						continue;
					Tri t0{x, y, c}, t1{y, x, d};
					if (orient(pts[t0[0]], pts[t0[1]], pts[t0[2]]) < 0)
						std::swap(t0[0], t0[1]);
					if (orient(pts[t1[0]], pts[t1[1]], pts[t1[2]]) < 0)
						std::swap(t1[0], t1[1]);
					tris[tt[0]] = t0;
					tris[tt[1]] = t1;
					flipped = true;
					break;
				}
				if (!flipped)
					throw GeometryError("could not recover constraint segment");
			}
			throw GeometryError("constraint recovery did not terminate");
		}

		bool polygon_self_intersects(const Polygon &poly)
		{
			const std::size_t n = poly.size();
			for (std::size_t i = 0; i < n; ++i)
				for (std::size_t j = i + 1; j < n; ++j)
				{
					if (j == i + 1 || (i == 0 && j == n - 1))
						continue;
					if (segments_cross(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]))
						return true;
				}
			return false;
		}
	} // namespace

	std::vector<std::array<int, 3>> constrained_delaunay(const std::vector<Vec2> &points,
	                                                     const std::vector<std::array<int, 2>> &segments)
	{
		auto tris = bowyer_watson(points);
		for (const auto &[a, b] : segments)
			recover_segment(points, tris, a, b);
		return tris;
	}

	void validate(const DomainGeometry &geometry)
	{
		if (!(geometry.half_width > 0) || !(geometry.layer > 0))
			throw GeometryError("box half width and absorbing layer must be positive");
		for (const auto &poly : geometry.metal)
		{
			if (poly.size() < 3)
				throw GeometryError("metal polygon needs at least three corners");
			if (std::abs(signed_area(poly)) < 1e-12)
				throw GeometryError("metal polygon has zero area");
			if (polygon_self_intersects(poly))
				throw GeometryError("metal polygon is self-intersecting");
			for (const auto &p : poly)
				if (p.cwiseAbs().maxCoeff() >= geometry.half_width)
					throw GeometryError("metal polygon must lie strictly inside the physical box");
		}
	}

	Mesh2D build_domain_mesh(const DomainGeometry &geometry, double h0, unsigned seed)
	{
		if (!(h0 > 0) || !std::isfinite(h0))
			throw GeometryError("initial mesh size must be positive");
		validate(geometry);

		const double L = geometry.half_width;
		const double R = geometry.outer();

		std::vector<Vec2> pts;
		std::map<std::pair<long long, long long>, int> index;
		auto add_point = [&](const Vec2 &p) {
			const auto k = std::make_pair(std::llround(p(0) * 1e9), std::llround(p(1) * 1e9));
			auto [it, inserted] = index.try_emplace(k, static_cast<int>(pts.size()));
			if (inserted)
				pts.push_back(p);
			return it->second;
		};

		std::vector<std::array<int, 2>> segments;
		std::vector<std::array<Vec2, 2>> segment_geometry;
		auto add_segment = [&](const Vec2 &a, const Vec2 &b, int min_pieces) {
			const int n = std::max(min_pieces, static_cast<int>(std::ceil((b - a).norm() / h0 - 1e-9)));
			int prev = add_point(a);
			for (int k = 1; k <= n; ++k)
			{
				const Vec2 p = (k == n) ? b : Vec2(a + (b - a) * (static_cast<double>(k) / n));
				const int cur = add_point(p);
				segments.push_back({prev, cur});
				prev = cur;
			}
			segment_geometry.push_back({a, b});
		};

		// Outer boundary, split where the frame corner lines meet it.
		const std::array<double, 4> ticks{-R, -L, L, R};
		for (int i = 0; i < 3; ++i)
		{
			add_segment(Vec2(ticks[i], -R), Vec2(ticks[i + 1], -R), 1);
			add_segment(Vec2(ticks[i], R), Vec2(ticks[i + 1], R), 1);
			add_segment(Vec2(-R, ticks[i]), Vec2(-R, ticks[i + 1]), 1);
			add_segment(Vec2(R, ticks[i]), Vec2(R, ticks[i + 1]), 1);
		}
		// Physical box and the lines separating frame sides from frame corners.
		for (double s : {-L, L})
		{
			add_segment(Vec2(-L, s), Vec2(L, s), 1);
			add_segment(Vec2(s, -L), Vec2(s, L), 1);
			add_segment(Vec2(s, L), Vec2(s, R), 1);
			add_segment(Vec2(s, -L), Vec2(s, -R), 1);
			add_segment(Vec2(L, s), Vec2(R, s), 1);
			add_segment(Vec2(-L, s), Vec2(-R, s), 1);
		}
		for (const auto &poly : geometry.metal)
			for (std::size_t i = 0; i < poly.size(); ++i)
				add_segment(poly[i], poly[(i + 1) % poly.size()], 2);

		// Jittered triangular lattice away from the constraints.
		std::mt19937 rng(seed);
		std::uniform_real_distribution<double> jitter(-0.05 * h0, 0.05 * h0);
		const double dy = h0 * std::sqrt(3.0) / 2.0;
		const int rows = static_cast<int>(std::floor(2 * R / dy));
		const int cols = static_cast<int>(std::floor(2 * R / h0)) + 1;
		for (int j = 1; j < rows + 1; ++j)
			for (int i = 0; i <= cols; ++i)
			{
				Vec2 p(-R + i * h0 + ((j % 2) ? 0.5 * h0 : 0.0), -R + j * dy);
				p += Vec2(jitter(rng), jitter(rng));
				if (p.cwiseAbs().maxCoeff() > R - 0.5 * h0)
					continue;
				bool keep = true;
				for (const auto &[a, b] : segment_geometry)
					if (segment_distance(p, a, b) < 0.55 * h0)
					{
						keep = false;
						break;
					}
				if (keep)
					pts.push_back(p);
			}

		auto tris = constrained_delaunay(pts, segments);

		std::vector<Mesh2D::Triangle> triangles;
		std::vector<Region> regions;
		triangles.reserve(tris.size());
		for (auto t : tris)
		{
			if (orient(pts[t[0]], pts[t[1]], pts[t[2]]) < 0)
				std::swap(t[1], t[2]);
			// Longest edge opposite local vertex 0.
			int longest = 0;
			double lmax = -1;
			for (int i = 0; i < 3; ++i)
			{
				const double l = (pts[t[(i + 1) % 3]] - pts[t[(i + 2) % 3]]).squaredNorm();
				if (l > lmax * (1 + 1e-12))
				{
					lmax = l;
					longest = i;
				}
			}
			std::rotate(t.begin(), t.begin() + longest, t.end());
			triangles.push_back(t);

			const Vec2 c = (pts[t[0]] + pts[t[1]] + pts[t[2]]) / 3.0;
			Region r = Region::Vacuum;
			if (c.cwiseAbs().maxCoeff() > L)
				r = Region::PML;
			else
				for (const auto &poly : geometry.metal)
					if (point_in_polygon(c, poly))
						r = Region::Metal;
			regions.push_back(r);
		}
		return Mesh2D(std::move(pts), std::move(triangles), std::move(regions));
	}

	Mesh2D square_mesh(int n, double half, double metal_half)
	{
		if (n < 1 || !(half > 0))
			throw GeometryError("square mesh needs n >= 1 and a positive half width");
		const double cells = metal_half * n / (2 * half);
		if (metal_half > 0 && std::abs(cells - std::round(cells)) > 1e-9)
			throw GeometryError("metal square does not fall on grid lines");

		const double h = 2 * half / n;
		std::vector<Vec2> pts;
		for (int j = 0; j <= n; ++j)
			for (int i = 0; i <= n; ++i)
				pts.emplace_back(-half + i * h, -half + j * h);
		auto id = [n](int i, int j) { return j * (n + 1) + i; };

		std::vector<Mesh2D::Triangle> triangles;
		std::vector<Region> regions;
		for (int j = 0; j < n; ++j)
			for (int i = 0; i < n; ++i)
			{
				const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
				const Vec2 centre(-half + (i + 0.5) * h, -half + (j + 0.5) * h);
				const Region r = centre.cwiseAbs().maxCoeff() < metal_half ? Region::Metal : Region::Vacuum;
				triangles.push_back({b, c, a});
				triangles.push_back({d, a, c});
				regions.push_back(r);
				regions.push_back(r);
			}
		return Mesh2D(std::move(pts), std::move(triangles), std::move(regions));
	}
} // namespace nhd
