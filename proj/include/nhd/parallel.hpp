#pragma once

#include <algorithm>
#include <thread>
#include <vector>

namespace nhd
{
	/// Runs body(begin, end) over contiguous chunks of [0, n). Chunk boundaries
	/// depend only on n and jobs, so per-chunk results merged in chunk order are
	/// independent of scheduling.
	template <typename Body>
	void parallel_chunks(int n, int jobs, Body &&body)
	{
		jobs = std::max(1, std::min(jobs, n));
		if (jobs == 1)
		{
			body(0, n, 0);
			return;
		}
		std::vector<std::jthread> workers;
		workers.reserve(jobs);
		for (int w = 0; w < jobs; ++w)
		{
			const int begin = static_cast<int>(static_cast<long long>(n) * w / jobs);
			const int end = static_cast<int>(static_cast<long long>(n) * (w + 1) / jobs);
			workers.emplace_back([&body, begin, end, w] { body(begin, end, w); });
		}
	}
} // namespace nhd
