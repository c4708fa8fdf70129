# two colors; a_i, b_i stand for 2i-1, 2i
system M
colors a b
matrix
  a 0 2
  b 1 0
exclude a1

# three colors; a_i, b_i, c_i stand for 3i-2, 3i-1, 3i
system R
colors a b c
matrix
  a 0 1 1
  b 1 0 2
  c 1 0 0
exclude b1

system Rprime
colors a b c
matrix
  a 0 1 2
  b 1 0 1
  c 0 1 0
exclude a1
