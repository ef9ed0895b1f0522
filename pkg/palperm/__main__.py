from palperm.main import run

run()
