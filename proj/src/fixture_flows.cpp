#include "flowmine/synth.hpp"

namespace flowmine::synth {

namespace {

// Two CPUs with private L1s, a shared L2 and memory, plus DMA, GPU, disk and
// an interrupt controller. CPU-initiated flows come first.
constexpr std::string_view kFixture = R"(# ten-flow SoC fixture
flow cpu0_read
1 (cpu0:l1c0:rd:req)
2 (l1c0:cpu0:rd:resp)
3 (l1c0:l2:rd:req)
4 (l2:l1c0:rd:resp)
5 (l2:mem:rd:req)
6 (mem:l2:rd:resp)
11 (l2:mem:wr:req)
12 (mem:l2:wr:resp)
1 -> 2
1 -> 3
3 -> 4
4 -> 2
3 -> 5
5 -> 6
6 -> 4
3 -> 11
11 -> 12
12 -> 5

flow cpu0_write
7 (cpu0:l1c0:wr:req)
8 (l1c0:cpu0:wr:resp)
9 (l1c0:l2:wr:req)
10 (l2:l1c0:wr:resp)
3 (l1c0:l2:rd:req)
4 (l2:l1c0:rd:resp)
5 (l2:mem:rd:req)
6 (mem:l2:rd:resp)
11 (l2:mem:wr:req)
12 (mem:l2:wr:resp)
7 -> 8
7 -> 9
9 -> 10
10 -> 8
9 -> 11
11 -> 12
12 -> 10
7 -> 3
3 -> 4
4 -> 8
3 -> 5
5 -> 6
6 -> 4

flow cpu1_read
13 (cpu1:l1c1:rd:req)
14 (l1c1:cpu1:rd:resp)
15 (l1c1:l2:rd:req)
16 (l2:l1c1:rd:resp)
5 (l2:mem:rd:req)
6 (mem:l2:rd:resp)
11 (l2:mem:wr:req)
12 (mem:l2:wr:resp)
13 -> 14
13 -> 15
15 -> 16
16 -> 14
15 -> 5
5 -> 6
6 -> 16
15 -> 11
11 -> 12
12 -> 5

flow cpu1_write
17 (cpu1:l1c1:wr:req)
18 (l1c1:cpu1:wr:resp)
19 (l1c1:l2:wr:req)
20 (l2:l1c1:wr:resp)
15 (l1c1:l2:rd:req)
16 (l2:l1c1:rd:resp)
5 (l2:mem:rd:req)
6 (mem:l2:rd:resp)
11 (l2:mem:wr:req)
12 (mem:l2:wr:resp)
17 -> 18
17 -> 19
19 -> 20
20 -> 18
19 -> 11
11 -> 12
12 -> 20
17 -> 15
15 -> 16
16 -> 18
15 -> 5
5 -> 6
6 -> 16

flow dma_read
21 (dma:l2:rd:req)
22 (l2:dma:rd:resp)
5 (l2:mem:rd:req)
6 (mem:l2:rd:resp)
11 (l2:mem:wr:req)
12 (mem:l2:wr:resp)
21 -> 22
21 -> 5
5 -> 6
6 -> 22
21 -> 11
11 -> 12
12 -> 5

flow dma_write
23 (dma:l2:wr:req)
24 (l2:dma:wr:resp)
11 (l2:mem:wr:req)
12 (mem:l2:wr:resp)
25 (l2:l1c0:inv:req)
26 (l1c0:l2:inv:resp)
27 (l2:l1c1:inv:req)
28 (l1c1:l2:inv:resp)
23 -> 24
23 -> 11
11 -> 12
12 -> 24
23 -> 25
25 -> 26
26 -> 24
23 -> 27
27 -> 28
28 -> 24

flow uart_irq
29 (uart:intc:irq:req)
30 (intc:cpu0:irq:req)
31 (cpu0:intc:ack:resp)
32 (intc:uart:irq:resp)
33 (intc:cpu1:irq:req)
34 (cpu1:intc:ack:resp)
29 -> 30
30 -> 31
31 -> 32
29 -> 33
33 -> 34
34 -> 32

flow gpu_read
35 (gpu:l2:rd:req)
36 (l2:gpu:rd:resp)
5 (l2:mem:rd:req)
6 (mem:l2:rd:resp)
11 (l2:mem:wr:req)
12 (mem:l2:wr:resp)
35 -> 36
35 -> 5
5 -> 6
6 -> 36
35 -> 11
11 -> 12
12 -> 5

flow gpu_write
37 (gpu:l2:wr:req)
38 (l2:gpu:wr:resp)
11 (l2:mem:wr:req)
12 (mem:l2:wr:resp)
25 (l2:l1c0:inv:req)
26 (l1c0:l2:inv:resp)
27 (l2:l1c1:inv:req)
28 (l1c1:l2:inv:resp)
37 -> 38
37 -> 11
11 -> 12
12 -> 38
37 -> 25
25 -> 26
26 -> 38
26 -> 11
37 -> 27
27 -> 28
28 -> 38

flow disk_write
39 (disk:iobus:wr:req)
40 (iobus:l2:wr:req)
41 (l2:iobus:wr:resp)
42 (iobus:disk:wr:resp)
11 (l2:mem:wr:req)
12 (mem:l2:wr:resp)
25 (l2:l1c0:inv:req)
26 (l1c0:l2:inv:resp)
39 -> 40
40 -> 41
41 -> 42
40 -> 11
11 -> 12
12 -> 41
40 -> 25
25 -> 26
26 -> 41
)";

}  // namespace

std::string_view fixture_text() { return kFixture; }

const FlowLibrary& fixture_library() {
  static const FlowLibrary library = parse_flow_library(kFixture);
  return library;
}

}  // namespace flowmine::synth
